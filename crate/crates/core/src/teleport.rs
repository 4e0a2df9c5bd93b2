//! Teleportation chains and the reorder / interact / simulate constructions
//! built from them on an `n x n` grid with data in column 0.
//!
//! A chain phase always occupies seven physical timesteps:
//! Bell-pair preparation (H, CNOT), Bell measurement (CNOT, H, measure),
//! correction together with resets of measured qubits, and a final SWAP
//! for chains of odd length. Layers unused by every chain stay empty so the
//! depth of a phase does not depend on chain lengths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::circuit::{
    AdaptiveCircuit, Addr, BasicOp, CircuitBuilder, ClassicalCondition, Gate, MeasurementId, Model,
};
use crate::error::{Error, Result};
use crate::geom::GridPoint;
use crate::pauli::{correction_condition, BellOutcome};

pub const PHASE_DEPTH: usize = 7;

fn check_line(line: &[GridPoint]) -> Result<()> {
    for w in line.windows(2) {
        if !w[0].is_adjacent(&w[1]) {
            return Err(Error::NotAdjacent(w[0].to_string(), w[1].to_string()));
        }
    }
    Ok(())
}

fn reset_op(q: &GridPoint, id: MeasurementId) -> BasicOp {
    BasicOp::correction(
        q,
        ClassicalCondition {
            x_parity_of: [id].into(),
            z_parity_of: BTreeSet::new(),
        },
    )
}

/// Parallel chains sharing one seven-layer phase.
#[derive(Clone, Debug, Default)]
pub struct ChainPhase {
    layers: [Vec<BasicOp>; PHASE_DEPTH],
}

impl ChainPhase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a chain moving the state at `line[0]` to its last point. Every
    /// other point must hold `|0>` and ends in `|0>`.
    pub fn add_chain(&mut self, line: &[GridPoint], builder: &mut CircuitBuilder) -> Result<Vec<BellOutcome>> {
        check_line(line)?;
        if line.len() < 2 {
            return Ok(Vec::new());
        }
        let d = line.len() - 1;
        let even = d & !1;
        let mut outcomes = Vec::new();
        for i in (0..even).step_by(2) {
            let (a, b, c) = (&line[i], &line[i + 1], &line[i + 2]);
            self.layers[0].push(BasicOp::single(Gate::H, b));
            self.layers[1].push(BasicOp::cnot(b, c));
            self.layers[2].push(BasicOp::cnot(a, b));
            self.layers[3].push(BasicOp::single(Gate::H, a));
            let phase_bit = builder.allocate_measurement(&a.into());
            let flip_bit = builder.allocate_measurement(&b.into());
            self.layers[4].push(BasicOp::measure(a, phase_bit));
            self.layers[4].push(BasicOp::measure(b, flip_bit));
            self.layers[5].push(reset_op(a, phase_bit));
            self.layers[5].push(reset_op(b, flip_bit));
            outcomes.push(BellOutcome { phase_bit, flip_bit });
        }
        if even > 0 {
            self.layers[5].push(BasicOp::correction(&line[even], correction_condition(&outcomes)));
        }
        if d % 2 == 1 {
            self.layers[6].push(BasicOp::swap(&line[even], &line[d]));
        }
        Ok(outcomes)
    }

    pub fn emit(self, builder: &mut CircuitBuilder) {
        for layer in self.layers {
            builder.physical(layer);
        }
    }
}

/// Two timesteps leaving `(a, b)` in `(|00> + |11>)/sqrt2`.
pub fn emit_bell_pair(a: &GridPoint, b: &GridPoint, builder: &mut CircuitBuilder) -> Result<()> {
    check_line(&[a.clone(), b.clone()])?;
    builder.physical(vec![BasicOp::single(Gate::H, a)]);
    builder.physical(vec![BasicOp::cnot(a, b)]);
    Ok(())
}

/// Three timesteps measuring `(a, b)` in the Bell basis.
pub fn emit_bell_measure(a: &GridPoint, b: &GridPoint, builder: &mut CircuitBuilder) -> Result<BellOutcome> {
    check_line(&[a.clone(), b.clone()])?;
    builder.physical(vec![BasicOp::cnot(a, b)]);
    builder.physical(vec![BasicOp::single(Gate::H, a)]);
    let phase_bit = builder.allocate_measurement(&a.into());
    let flip_bit = builder.allocate_measurement(&b.into());
    builder.physical(vec![BasicOp::measure(a, phase_bit), BasicOp::measure(b, flip_bit)]);
    Ok(BellOutcome { phase_bit, flip_bit })
}

/// One full phase for a single chain; an empty circuit for zero distance.
pub fn emit_chain(line: &[GridPoint], builder: &mut CircuitBuilder) -> Result<Vec<BellOutcome>> {
    if line.len() < 2 {
        check_line(line)?;
        return Ok(Vec::new());
    }
    let mut phase = ChainPhase::new();
    let outcomes = phase.add_chain(line, builder)?;
    phase.emit(builder);
    Ok(outcomes)
}

/// One timestep returning each measured qubit to `|0>`.
pub fn emit_reset(qubits: &[GridPoint], builder: &mut CircuitBuilder) -> Result<()> {
    let ops = qubits
        .iter()
        .map(|q| {
            builder
                .last_measurement(&q.into())
                .map(|id| reset_op(q, id))
                .ok_or_else(|| Error::NotMeasured(q.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    builder.physical(ops);
    Ok(())
}

/// A permutation request: the data qubit in row `j` of column 0 moves to
/// `(pi[j], 0)` for every key `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReorderSpec {
    pub n: usize,
    /// Encoded as a list of `[row, destination]` pairs.
    #[serde(with = "pairs")]
    pub pi: BTreeMap<usize, usize>,
}

mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, usize>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().map(|(&k, &v)| [k, v]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, usize>, D::Error> {
        let list: Vec<[usize; 2]> = Deserialize::deserialize(d)?;
        let map: BTreeMap<usize, usize> = list.iter().map(|&[k, v]| (k, v)).collect();
        if map.len() != list.len() {
            return Err(serde::de::Error::custom("a row appears twice"));
        }
        Ok(map)
    }
}

impl ReorderSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let mut images = BTreeSet::new();
        for (&j, &t) in &self.pi {
            if j >= self.n || t >= self.n {
                return bad(format!("index out of range for n = {}: {j} -> {t}", self.n));
            }
            if !images.insert(t) {
                return bad(format!("two qubits sent to column {t}"));
            }
            if t == 0 && (0..j).any(|k| !self.pi.contains_key(&k)) {
                return bad(format!(
                    "qubit {j} is sent to row 0 but a lower qubit stays in its way"
                ));
            }
        }
        Ok(())
    }

    /// Number of qubits whose target column is not 0.
    pub fn moved(&self) -> usize {
        self.pi.values().filter(|&&t| t != 0).count()
    }
}

/// A straight teleportation route.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub from: GridPoint,
    pub to: GridPoint,
}

impl Chain {
    pub fn points(&self) -> Vec<GridPoint> {
        let (a, b) = (&self.from, &self.to);
        let steps = (a.x() - b.x()).abs().max((a.y() - b.y()).abs());
        let dx = (b.x() - a.x()).signum();
        let dy = (b.y() - a.y()).signum();
        (0..=steps).map(|s| GridPoint::xy(a.x() + s * dx, a.y() + s * dy)).collect()
    }
}

fn p(x: usize, y: usize) -> GridPoint {
    GridPoint::xy(x as i64, y as i64)
}

/// Chains of both phases, forward direction, skipping empty ones.
pub fn reorder_chains(spec: &ReorderSpec) -> [Vec<Chain>; 2] {
    let horizontal = spec
        .pi
        .iter()
        .filter(|(_, &t)| t != 0)
        .map(|(&j, &t)| Chain { from: p(0, j), to: p(t, j) })
        .collect();
    let vertical = spec
        .pi
        .iter()
        .filter(|(&j, _)| j != 0)
        .map(|(&j, &t)| Chain { from: p(t, j), to: p(t, 0) })
        .collect();
    [horizontal, vertical]
}

fn emit_phase(chains: &[Chain], reverse: bool, builder: &mut CircuitBuilder) -> Result<()> {
    let mut phase = ChainPhase::new();
    for c in chains {
        let mut line = c.points();
        if reverse {
            line.reverse();
        }
        phase.add_chain(&line, builder)?;
    }
    phase.emit(builder);
    Ok(())
}

/// Emit the two phases, or their mirror image when `reverse` is set. With
/// `pad`, an empty request still occupies its fourteen timesteps.
pub fn emit_reorder(spec: &ReorderSpec, reverse: bool, pad: bool, builder: &mut CircuitBuilder) -> Result<()> {
    spec.validate()?;
    if spec.pi.is_empty() && !pad {
        return Ok(());
    }
    let [horizontal, vertical] = reorder_chains(spec);
    if reverse {
        emit_phase(&vertical, true, builder)?;
        emit_phase(&horizontal, true, builder)
    } else {
        emit_phase(&horizontal, false, builder)?;
        emit_phase(&vertical, false, builder)
    }
}

fn grid_builder(n: usize) -> CircuitBuilder {
    let mut b = CircuitBuilder::new(Model::Ccntc, 2);
    b.set_grid_side(n).set_inputs(n);
    b
}

pub fn reorder(spec: &ReorderSpec) -> Result<AdaptiveCircuit> {
    let mut b = grid_builder(spec.n);
    emit_reorder(spec, false, false, &mut b)?;
    Ok(b.finish())
}

/// One abstract timestep: disjoint operations on one or two of `n` qubits,
/// addressed by index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub n: usize,
    pub ops: Vec<BasicOp>,
}

impl InteractionSpec {
    fn indices(op: &BasicOp) -> Result<Vec<usize>> {
        op.qubits
            .iter()
            .map(|q| match q {
                Addr::Index(i) => Ok(*i),
                other => Err(Error::InvalidArgument(format!("expected an index, got {other}"))),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut used = BTreeSet::new();
        for op in &self.ops {
            let idx = Self::indices(op)?;
            if idx.is_empty() || idx.len() > 2 || op.gate.arity() != idx.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} on {} qubits cannot be routed",
                    op.gate,
                    idx.len()
                )));
            }
            for i in idx {
                if i >= self.n || !used.insert(i) {
                    return Err(Error::InvalidArgument(format!("qubit {i} out of range or reused")));
                }
            }
        }
        Ok(())
    }

    /// The reorder bringing each pair next to each other in row 0.
    pub fn routing(&self) -> Result<ReorderSpec> {
        self.validate()?;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut singles = false;
        for op in &self.ops {
            let idx = Self::indices(op)?;
            match idx[..] {
                [a, b] => pairs.push((a.min(b), a.max(b))),
                _ => singles = true,
            }
        }
        pairs.sort();
        let start = match pairs.first() {
            Some((0, _)) if !singles => 0,
            _ => 1,
        };
        let mut pi = BTreeMap::new();
        for (k, (a, b)) in pairs.into_iter().enumerate() {
            pi.insert(a, start + 2 * k);
            pi.insert(b, start + 2 * k + 1);
        }
        let spec = ReorderSpec { n: self.n, pi };
        spec.validate()?;
        Ok(spec)
    }
}

/// Emit one routed interaction step. Measurement ids of the abstract
/// operations are renumbered through `ids`.
pub fn emit_interact(
    spec: &InteractionSpec,
    pad: bool,
    ids: &mut HashMap<MeasurementId, MeasurementId>,
    builder: &mut CircuitBuilder,
) -> Result<()> {
    let routing = spec.routing()?;
    emit_reorder(&routing, false, pad, builder)?;
    let mut ops = Vec::with_capacity(spec.ops.len());
    for op in &spec.ops {
        let idx = InteractionSpec::indices(op)?;
        let place = |i: usize| match routing.pi.get(&i) {
            Some(&t) => p(t, 0),
            None => p(0, i),
        };
        let mut out = op.clone();
        out.qubits = idx.iter().map(|&i| Addr::Grid(place(i))).collect();
        if let Some(id) = op.measurement_id {
            let fresh = builder.allocate_measurement(&out.qubits[0]);
            ids.insert(id, fresh);
            out.measurement_id = Some(fresh);
        }
        if let Some(cond) = &op.condition {
            let map = |s: &BTreeSet<MeasurementId>| -> Result<BTreeSet<MeasurementId>> {
                s.iter()
                    .map(|id| ids.get(id).copied().ok_or(Error::UnknownMeasurement(id.0)))
                    .collect()
            };
            out.condition = Some(ClassicalCondition {
                x_parity_of: map(&cond.x_parity_of)?,
                z_parity_of: map(&cond.z_parity_of)?,
            });
        }
        ops.push(out);
    }
    builder.physical(ops);
    emit_reorder(&routing, true, pad, builder)
}

pub fn interact(spec: &InteractionSpec) -> Result<AdaptiveCircuit> {
    let mut b = grid_builder(spec.n);
    emit_interact(spec, false, &mut HashMap::new(), &mut b)?;
    Ok(b.finish())
}

/// Timesteps per simulated abstract timestep.
pub const BLOCK_DEPTH: usize = 4 * PHASE_DEPTH + 1;

/// Compile an abstract circuit on `n` qubits onto an `n x n` grid with data
/// qubit `j` at `(0, j)`. Every abstract timestep becomes a block of
/// [`BLOCK_DEPTH`] grid timesteps.
pub fn simulate_ccac(circuit: &AdaptiveCircuit) -> Result<AdaptiveCircuit> {
    if circuit.model != Model::Ccac {
        return Err(Error::InvalidArgument("expected an abstract-model circuit".into()));
    }
    let n = circuit
        .qubits()
        .iter()
        .filter_map(|a| match a {
            Addr::Index(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(circuit.n_inputs);
    let mut b = grid_builder(n);
    let mut ids = HashMap::new();
    for step in &circuit.timesteps {
        if let Some(op) = step.ops.iter().find(|op| op.gate.arity() > 2) {
            return Err(Error::InvalidArgument(format!(
                "{} acts on {} qubits; only one- and two-qubit gates can be simulated",
                op.gate,
                op.gate.arity()
            )));
        }
        let spec = InteractionSpec {
            n,
            ops: step.ops.clone(),
        };
        emit_interact(&spec, true, &mut ids, &mut b)?;
    }
    Ok(b.finish())
}
