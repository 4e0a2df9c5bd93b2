//! End-to-end checks of generated circuits against what their metadata says
//! they compute.
//!
//! * Controlled-U and fan-out: classical runs over control assignments
//!   (boolean), or state-vector runs of the physical expansion (dense).
//! * Reorder, interact and abstract-circuit compilations: the grid circuit
//!   is compared with the abstract reference, either through a Choi-state
//!   check in the stabilizer simulator or by comparing reduced density
//!   matrices of random inputs in the dense simulator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{expand_to_physical, AdaptiveCircuit, Addr, BasicOp, Gate, Mat2, Model, Timestep};
use crate::compactor::plan;
use crate::error::{Error, Result};
use crate::format::{CircuitDocument, CircuitMeta};
use crate::geom::GridPoint;
use crate::sim::boolean::BooleanProgram;
use crate::sim::dense::{DenseState, MAX_DENSE_QUBITS};
use crate::sim::density::{pure, trace_distance};
use crate::sim::stabilizer::StabilizerState;
use crate::sim::{QubitMap, Record, SeededOutcomes};
use crate::teleport::ReorderSpec;

/// Assignments up to this many controls are enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 16;
/// Amplitude and trace-distance tolerance of the dense checks.
pub const DENSE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sim {
    Boolean,
    Stabilizer,
    Dense,
}

impl FromStr for Sim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boolean" => Ok(Sim::Boolean),
            "stabilizer" => Ok(Sim::Stabilizer),
            "dense" => Ok(Sim::Dense),
            other => Err(Error::InvalidArgument(format!("unknown simulator {other:?}"))),
        }
    }
}

impl fmt::Display for Sim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sim::Boolean => "boolean",
            Sim::Stabilizer => "stabilizer",
            Sim::Dense => "dense",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub sim: Sim,
    /// Random cases when a check is not exhaustive; `None` picks a default
    /// per simulator.
    pub shots: Option<usize>,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(sim: Sim) -> Self {
        Self { sim, shots: None, seed: 0 }
    }

    fn shots(&self) -> usize {
        self.shots.unwrap_or(match self.sim {
            Sim::Boolean => 100_000,
            Sim::Stabilizer => 50,
            Sim::Dense => 5,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub kind: &'static str,
    pub sim: Sim,
    pub cases: usize,
    pub exhaustive: bool,
    /// Largest amplitude error or trace distance seen by a dense check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = if self.exhaustive { "exhaustive" } else { "sampled" };
        write!(f, "{} via {}: {} cases ({mode})", self.kind, self.sim, self.cases)?;
        if let Some(e) = self.max_error {
            write!(f, ", max error {e:.3e}")?;
        }
        match &self.failure {
            None => write!(f, ", ok"),
            Some(msg) => write!(f, ", FAILED: {msg}"),
        }
    }
}

/// The simulator each kind of circuit is checked with by default.
pub fn designated_sim(meta: &CircuitMeta) -> Sim {
    match meta {
        CircuitMeta::ControlledU { .. } | CircuitMeta::Fanout { .. } => Sim::Boolean,
        CircuitMeta::Reorder { .. } => Sim::Stabilizer,
        CircuitMeta::Interact { spec } => {
            if spec.ops.iter().all(is_clifford) {
                Sim::Stabilizer
            } else {
                Sim::Dense
            }
        }
        CircuitMeta::Ccac { .. } => Sim::Dense,
    }
}

pub fn verify(doc: &CircuitDocument, opts: &VerifyOptions) -> Result<VerifyReport> {
    let meta = doc
        .meta
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("document has no metadata to verify against".into()))?;
    let circuit = doc.circuit();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match meta {
        CircuitMeta::ControlledU { m, dim, u } => {
            let mut report = match opts.sim {
                Sim::Boolean => controlled_boolean(&circuit, *m, *dim, *u, opts.shots(), &mut rng),
                Sim::Dense => controlled_dense(&circuit, *m, *dim, *u, opts.shots(), &mut rng),
                Sim::Stabilizer => Err(unsupported("controlled-u", opts.sim)),
            }?;
            report.kind = "controlled-u";
            Ok(report)
        }
        CircuitMeta::Fanout { m, dim } => {
            let mut report = match opts.sim {
                Sim::Boolean => fanout_boolean(&circuit, *m, *dim, opts.shots(), &mut rng),
                Sim::Dense => fanout_dense(&circuit, *m, *dim, opts.shots(), &mut rng),
                Sim::Stabilizer => Err(unsupported("fanout", opts.sim)),
            }?;
            report.kind = "fanout";
            Ok(report)
        }
        CircuitMeta::Reorder { spec } => {
            let reference = abstract_circuit(spec.n, &[]);
            let mut report = against_reference(&circuit, &reference, &reorder_destinations(spec), opts, &mut rng)?;
            report.kind = "reorder";
            Ok(report)
        }
        CircuitMeta::Interact { spec } => {
            let reference = abstract_circuit(spec.n, std::slice::from_ref(&spec.ops));
            let mut report = against_reference(&circuit, &reference, &column_zero(spec.n), opts, &mut rng)?;
            report.kind = "interact";
            Ok(report)
        }
        CircuitMeta::Ccac { source } => {
            let reference = source.circuit();
            let n = doc.grid_side.unwrap_or(reference.n_inputs);
            let mut report = against_reference(&circuit, &reference, &column_zero(n), opts, &mut rng)?;
            report.kind = "ccac";
            Ok(report)
        }
    }
}

fn unsupported(kind: &str, sim: Sim) -> Error {
    Error::InvalidArgument(format!("{kind} circuits cannot be checked with the {sim} simulator"))
}

fn report(sim: Sim, cases: usize, exhaustive: bool) -> VerifyReport {
    VerifyReport {
        kind: "",
        sim,
        cases,
        exhaustive,
        max_error: None,
        failure: None,
    }
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Control assignments to try: all of them for small layouts, otherwise the
/// all-ones assignment, every single-zero neighbor of it, then random ones.
fn control_masks(n: usize, shots: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<bool>>, bool) {
    if n <= EXHAUSTIVE_LIMIT {
        let all = (0..1u64 << n).map(|v| (0..n).map(|i| v >> i & 1 == 1).collect()).collect();
        return (all, true);
    }
    let mut masks = vec![vec![true; n]];
    for i in 0..n {
        let mut m = vec![true; n];
        m[i] = false;
        masks.push(m);
    }
    masks.extend((0..shots).map(|_| (0..n).map(|_| rng.gen::<bool>()).collect()));
    (masks, false)
}

fn apply(u: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    let [a, b, c, d] = u.0;
    [a * v[0] + b * v[1], c * v[0] + d * v[1]]
}

fn probe_vector() -> [Complex64; 2] {
    [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]
}

fn controlled_boolean(
    circuit: &AdaptiveCircuit,
    m: usize,
    dim: usize,
    u: Mat2,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    let layout = plan(m, dim)?.layout;
    let target = Addr::from(&layout.target);
    let controls: Vec<Addr> = layout.controls.iter().map(Addr::from).collect();
    let prog = BooleanProgram::compile(circuit, Some(&target), &controls)?;
    let slots: Vec<usize> = controls.iter().map(|a| prog.index(a)).collect::<Result<_>>()?;
    let (masks, exhaustive) = control_masks(controls.len(), shots, rng);
    let mut out = report(Sim::Boolean, masks.len(), exhaustive);
    for mask in &masks {
        let mut bits = vec![false; prog.map().len()];
        for (&s, &v) in slots.iter().zip(mask) {
            bits[s] = v;
        }
        let before = bits.clone();
        let mut vector = probe_vector();
        prog.run(&mut bits, &mut vector);
        let expected = if mask.iter().all(|&b| b) { apply(&u, probe_vector()) } else { probe_vector() };
        let changed = bits.iter().zip(&before).position(|(a, b)| a != b);
        let wrong_target = (0..2).any(|i| (vector[i] - expected[i]).norm() > 1e-12);
        if changed.is_some() || wrong_target {
            let what = match changed {
                Some(i) => format!("qubit {} changed", prog.map().addrs()[i]),
                None => format!("target {:?} expected {:?}", vector, expected),
            };
            out.failure = Some(format!("controls {} (layout order): {what}", bits_string(mask)));
            return Ok(out);
        }
    }
    Ok(out)
}

fn dense_map(circuit: &AdaptiveCircuit, extra: impl IntoIterator<Item = Addr>) -> Result<QubitMap> {
    let map = QubitMap::for_circuit(circuit, extra);
    if map.len() > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits(map.len()));
    }
    Ok(map)
}

fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn controlled_dense(
    circuit: &AdaptiveCircuit,
    m: usize,
    dim: usize,
    u: Mat2,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    let layout = plan(m, dim)?.layout;
    let physical = expand_to_physical(circuit);
    let target = Addr::from(&layout.target);
    let controls: Vec<Addr> = layout.controls.iter().map(Addr::from).collect();
    let map = dense_map(&physical, controls.iter().cloned().chain([target.clone()]))?;
    let t = map.get(&target)?;
    let slots: Vec<usize> = controls.iter().map(|a| map.get(a)).collect::<Result<_>>()?;
    let (masks, exhaustive) = control_masks(controls.len(), shots.min(1 << 10), rng);
    let mut out = report(Sim::Dense, masks.len(), exhaustive);
    let mut worst: f64 = 0.0;
    for mask in &masks {
        let base = slots.iter().zip(mask).fold(0usize, |acc, (&s, &v)| acc | (usize::from(v) << s));
        let zero = Complex64::new(0.0, 0.0);
        let mut amps = vec![zero; 1 << map.len()];
        let v = probe_vector();
        amps[base] = v[0];
        amps[base | 1 << t] = v[1];
        let mut expected = vec![zero; amps.len()];
        let w = if mask.iter().all(|&b| b) { apply(&u, v) } else { v };
        expected[base] = w[0];
        expected[base | 1 << t] = w[1];
        let mut state = DenseState::from_amplitudes(map.clone(), amps)?;
        state.run(&physical, &mut SeededOutcomes::new(rng.gen()))?;
        let err = max_deviation(state.amplitudes(), &expected);
        worst = worst.max(err);
        if err > DENSE_TOLERANCE {
            out.failure = Some(format!("controls {} (layout order): amplitude error {err:.3e}", bits_string(mask)));
            break;
        }
    }
    out.max_error = Some(worst);
    Ok(out)
}

/// Inputs for fan-out: both source values, each with random bits on every
/// other qubit of the layout.
fn fanout_inputs(n_other: usize, shots: usize, rng: &mut ChaCha8Rng) -> Vec<(bool, Vec<bool>)> {
    let mut inputs = Vec::with_capacity(2 * (shots + 1));
    for source in [false, true] {
        inputs.push((source, vec![false; n_other]));
        for _ in 0..shots {
            inputs.push((source, (0..n_other).map(|_| rng.gen()).collect()));
        }
    }
    inputs
}

struct FanoutFrame {
    source: Addr,
    /// Layout qubits other than the source, copies first.
    others: Vec<Addr>,
    copies: usize,
}

fn fanout_frame(m: usize, dim: usize) -> Result<FanoutFrame> {
    let layout = plan(m, dim)?.layout;
    let copies = layout.controls.len();
    let others = layout
        .controls
        .iter()
        .chain(&layout.ancillas)
        .map(Addr::from)
        .collect();
    Ok(FanoutFrame {
        source: Addr::from(&layout.target),
        others,
        copies,
    })
}

fn fanout_boolean(
    circuit: &AdaptiveCircuit,
    m: usize,
    dim: usize,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    let frame = fanout_frame(m, dim)?;
    let extra: Vec<Addr> = frame.others.iter().cloned().chain([frame.source.clone()]).collect();
    let prog = BooleanProgram::compile(circuit, None, &extra)?;
    let src = prog.index(&frame.source)?;
    let slots: Vec<usize> = frame.others.iter().map(|a| prog.index(a)).collect::<Result<_>>()?;
    let inputs = fanout_inputs(slots.len(), shots, rng);
    let mut out = report(Sim::Boolean, inputs.len(), false);
    for (source, rest) in &inputs {
        let mut bits = vec![false; prog.map().len()];
        bits[src] = *source;
        for (&s, &v) in slots.iter().zip(rest) {
            bits[s] = v;
        }
        let mut expected = bits.clone();
        for &s in &slots[..frame.copies] {
            expected[s] ^= *source;
        }
        prog.run(&mut bits, &mut probe_vector());
        if let Some(i) = bits.iter().zip(&expected).position(|(a, b)| a != b) {
            out.failure = Some(format!(
                "source {} with others {}: qubit {} wrong",
                u8::from(*source),
                bits_string(rest),
                prog.map().addrs()[i]
            ));
            break;
        }
    }
    Ok(out)
}

fn fanout_dense(
    circuit: &AdaptiveCircuit,
    m: usize,
    dim: usize,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    let frame = fanout_frame(m, dim)?;
    let physical = expand_to_physical(circuit);
    let map = dense_map(&physical, frame.others.iter().cloned().chain([frame.source.clone()]))?;
    let src = map.get(&frame.source)?;
    let slots: Vec<usize> = frame.others.iter().map(|a| map.get(a)).collect::<Result<_>>()?;
    let inputs = fanout_inputs(slots.len(), shots, rng);
    let mut out = report(Sim::Dense, inputs.len(), false);
    let mut worst: f64 = 0.0;
    for (source, rest) in &inputs {
        let mut index = usize::from(*source) << src;
        for (&s, &v) in slots.iter().zip(rest) {
            index |= usize::from(v) << s;
        }
        let mut expected_index = index;
        if *source {
            for &s in &slots[..frame.copies] {
                expected_index ^= 1 << s;
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut amps = vec![zero; 1 << map.len()];
        amps[index] = Complex64::new(1.0, 0.0);
        let mut expected = vec![zero; amps.len()];
        expected[expected_index] = Complex64::new(1.0, 0.0);
        let mut state = DenseState::from_amplitudes(map.clone(), amps)?;
        state.run(&physical, &mut SeededOutcomes::new(rng.gen()))?;
        let err = max_deviation(state.amplitudes(), &expected);
        worst = worst.max(err);
        if err > DENSE_TOLERANCE {
            out.failure = Some(format!(
                "source {} with others {}: amplitude error {err:.3e}",
                u8::from(*source),
                bits_string(rest)
            ));
            break;
        }
    }
    out.max_error = Some(worst);
    Ok(out)
}

fn abstract_circuit(n: usize, steps: &[Vec<BasicOp>]) -> AdaptiveCircuit {
    let mut c = AdaptiveCircuit::new(Model::Ccac, 1);
    c.n_inputs = n;
    c.timesteps = steps.iter().map(|ops| Timestep::physical(ops.clone())).collect();
    c
}

fn column_zero(n: usize) -> Vec<GridPoint> {
    (0..n as i64).map(|j| GridPoint::xy(0, j)).collect()
}

/// Where each data row ends up after a reorder.
pub fn reorder_destinations(spec: &ReorderSpec) -> Vec<GridPoint> {
    (0..spec.n)
        .map(|j| match spec.pi.get(&j) {
            Some(&t) => GridPoint::xy(t as i64, 0),
            None => GridPoint::xy(0, j as i64),
        })
        .collect()
}

fn is_clifford(op: &BasicOp) -> bool {
    match &op.gate {
        Gate::H | Gate::X | Gate::Y | Gate::Z | Gate::S | Gate::Sdg | Gate::Cnot | Gate::Swap => true,
        Gate::Mcx { controls } => *controls <= 1,
        Gate::U { matrix } | Gate::Mcu { controls: 0, u: matrix } => {
            [Mat2::identity(), Mat2::x(), Mat2::y(), Mat2::z(), Mat2::h(), Mat2::s(), Mat2::sdg()]
                .iter()
                .any(|c| same_up_to_phase(c, matrix))
        }
        Gate::Mcu { controls: 1, u } => [Mat2::identity(), Mat2::x(), Mat2::z()].iter().any(|c| same_up_to_phase(c, u)),
        _ => false,
    }
}

fn same_up_to_phase(a: &Mat2, b: &Mat2) -> bool {
    let overlap: Complex64 = (0..4).map(|i| a.0[i].conj() * b.0[i]).sum();
    (overlap.norm() - 2.0).abs() < 1e-9
}

fn inverse(op: &BasicOp) -> BasicOp {
    let gate = match &op.gate {
        Gate::S => Gate::Sdg,
        Gate::Sdg => Gate::S,
        Gate::U { matrix } => Gate::U { matrix: matrix.dagger() },
        Gate::Mcu { controls, u } => Gate::Mcu {
            controls: *controls,
            u: u.dagger(),
        },
        g => g.clone(),
    };
    BasicOp::new(gate, op.qubits.clone())
}

/// Abstract-model operations of `reference` in order, rejecting anything
/// that is not a unitary gate on indexed qubits.
fn reference_ops(reference: &AdaptiveCircuit) -> Result<Vec<BasicOp>> {
    reference
        .ops()
        .map(|op| {
            if matches!(op.gate, Gate::Measure | Gate::PauliCorrection) || op.condition.is_some() {
                return Err(Error::InvalidArgument(
                    "reference circuits with measurements cannot be compared state by state".into(),
                ));
            }
            if op.qubits.iter().any(|q| q.grid().is_some()) {
                return Err(Error::InvalidArgument("reference circuit must address qubits by index".into()));
            }
            Ok(op.clone())
        })
        .collect()
}

fn against_reference(
    circuit: &AdaptiveCircuit,
    reference: &AdaptiveCircuit,
    destinations: &[GridPoint],
    opts: &VerifyOptions,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    let ops = reference_ops(reference)?;
    match opts.sim {
        Sim::Stabilizer => choi_check(circuit, &ops, destinations, opts.shots(), rng),
        Sim::Dense => dense_reference_check(circuit, reference, destinations, opts.shots(), rng),
        Sim::Boolean => Err(unsupported("teleportation", opts.sim)),
    }
}

/// Entangle each data qubit with a reference partner, run the grid circuit,
/// undo the abstract operations at the destinations and the entangling
/// step. Every qubit must then read 0 with certainty, for every sampled
/// sequence of measurement outcomes.
fn choi_check(
    circuit: &AdaptiveCircuit,
    ops: &[BasicOp],
    destinations: &[GridPoint],
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    if let Some(op) = ops.iter().find(|op| !is_clifford(op)) {
        return Err(Error::InvalidArgument(format!(
            "{} is not a Clifford gate; use the dense simulator",
            op.gate
        )));
    }
    let n = destinations.len();
    let partners: Vec<Addr> = (0..n).map(|j| Addr::Index(j + 1_000_000)).collect();
    let sources: Vec<Addr> = column_zero(n).into_iter().map(Addr::Grid).collect();
    let dests: Vec<Addr> = destinations.iter().cloned().map(Addr::Grid).collect();
    let map = QubitMap::for_circuit(
        circuit,
        partners.iter().chain(&sources).chain(&dests).cloned(),
    );
    let relocate = |op: &BasicOp| -> Result<BasicOp> {
        let mut out = op.clone();
        out.qubits = op
            .qubits
            .iter()
            .map(|q| match q {
                Addr::Index(j) if *j < n => Ok(dests[*j].clone()),
                other => Err(Error::UnknownQubit(other.to_string())),
            })
            .collect::<Result<_>>()?;
        Ok(out)
    };
    let undo: Vec<BasicOp> = ops.iter().rev().map(|op| relocate(&inverse(op))).collect::<Result<_>>()?;
    let mut out = report(Sim::Stabilizer, shots, false);
    for shot in 0..shots {
        let mut state = StabilizerState::zero(map.clone());
        let mut record = Record::default();
        let mut source = SeededOutcomes::new(rng.gen());
        for (p, s) in partners.iter().zip(&sources) {
            let (pi, si) = (map.get(p)?, map.get(s)?);
            state.h(pi);
            state.cnot(pi, si);
        }
        state.run(circuit, &mut source)?;
        for op in &undo {
            state.apply_op(op, &mut record, &mut source)?;
        }
        for (p, d) in partners.iter().zip(&dests) {
            let (pi, di) = (map.get(p)?, map.get(d)?);
            state.cnot(pi, di);
            state.h(pi);
        }
        if let Some(q) = (0..map.len()).find(|&q| state.peek_z(q) != Some(false)) {
            let addr = &map.addrs()[q];
            let who = match partners.iter().position(|p| p == addr) {
                Some(j) => format!("data qubit {j} did not arrive intact"),
                None => format!("qubit {addr} is not returned to |0>"),
            };
            out.failure = Some(format!("shot {shot}: {who}"));
            break;
        }
    }
    Ok(out)
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

fn dense_reference_check(
    circuit: &AdaptiveCircuit,
    reference: &AdaptiveCircuit,
    destinations: &[GridPoint],
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<VerifyReport> {
    let n = destinations.len();
    let sources: Vec<Addr> = column_zero(n).into_iter().map(Addr::Grid).collect();
    let dests: Vec<Addr> = destinations.iter().cloned().map(Addr::Grid).collect();
    let map = dense_map(circuit, sources.iter().chain(&dests).cloned())?;
    let src_idx: Vec<usize> = sources.iter().map(|a| map.get(a)).collect::<Result<_>>()?;
    let keep: Vec<usize> = dests.iter().map(|a| map.get(a)).collect::<Result<_>>()?;
    let ref_map = QubitMap::new((0..n).map(Addr::Index));
    let mut out = report(Sim::Dense, shots, false);
    let mut worst: f64 = 0.0;
    for shot in 0..shots {
        let psi = random_state(n, rng);
        let mut expected = DenseState::from_amplitudes(ref_map.clone(), psi.clone())?;
        expected.run(reference, &mut SeededOutcomes::new(0))?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << map.len()];
        for (b, a) in psi.iter().enumerate() {
            let index = src_idx.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | ((b >> j & 1) << q));
            amps[index] = *a;
        }
        let mut state = DenseState::from_amplitudes(map.clone(), amps)?;
        state.run(circuit, &mut SeededOutcomes::new(rng.gen()))?;
        let got = state.reduced_density(&keep);
        let dist = trace_distance(&got, &pure(expected.amplitudes()));
        worst = worst.max(dist);
        if dist > DENSE_TOLERANCE {
            out.failure = Some(format!("shot {shot}: trace distance {dist:.3e} on the data qubits"));
            break;
        }
    }
    out.max_error = Some(worst);
    Ok(out)
}
