use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{AdaptiveCircuit, Addr, BasicOp, Gate, MeasurementId, StepKind, Timestep};
use crate::geom::GridPoint;

/// Largest number of qubits a single logical operation may touch.
pub const MAX_LOGICAL_ARITY: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Arity { expected: usize, found: usize },
    EmptyGate,
    DuplicateQubit(String),
    AddressKind(String),
    OutOfGrid(String),
    Overlap(String),
    NotAdjacent(String, String),
    NotStar,
    TooWide(usize),
    NonBasicInPhysicalStep,
    ClassicalInLogicalStep,
    NonUnitary,
    MissingMeasurementId,
    UnexpectedMeasurementId,
    DuplicateMeasurement(u32),
    MeasurementOutOfRange(u32),
    MissingCondition,
    UnexpectedCondition,
    ConditionInNonAdaptiveModel,
    Causality(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub step: usize,
    pub op: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}", self.step)?;
        if let Some(op) = self.op {
            write!(f, " op {op}")?;
        }
        write!(f, ": ")?;
        match &self.kind {
            ViolationKind::Arity { expected, found } => {
                write!(f, "gate expects {expected} qubits, got {found}")
            }
            ViolationKind::EmptyGate => write!(f, "gate has no controls or targets"),
            ViolationKind::DuplicateQubit(q) => write!(f, "qubit {q} repeated within an operation"),
            ViolationKind::AddressKind(q) => write!(f, "address {q} does not fit the model"),
            ViolationKind::OutOfGrid(q) => write!(f, "qubit {q} lies outside the grid"),
            ViolationKind::Overlap(q) => write!(f, "qubit {q} used twice in one timestep"),
            ViolationKind::NotAdjacent(a, b) => write!(f, "qubits {a} and {b} are not adjacent"),
            ViolationKind::NotStar => write!(f, "multi-qubit gate is not local to its hub"),
            ViolationKind::TooWide(k) => write!(f, "logical gate touches {k} qubits"),
            ViolationKind::NonBasicInPhysicalStep => {
                write!(f, "physical timestep holds a gate on more than two qubits")
            }
            ViolationKind::ClassicalInLogicalStep => {
                write!(f, "measurement or correction inside a logical timestep")
            }
            ViolationKind::NonUnitary => write!(f, "matrix is not unitary"),
            ViolationKind::MissingMeasurementId => write!(f, "measurement without an id"),
            ViolationKind::UnexpectedMeasurementId => write!(f, "measurement id on a non-measurement"),
            ViolationKind::DuplicateMeasurement(id) => write!(f, "measurement id {id} reused"),
            ViolationKind::MeasurementOutOfRange(id) => {
                write!(f, "measurement id {id} exceeds the declared count")
            }
            ViolationKind::MissingCondition => write!(f, "Pauli correction without a condition"),
            ViolationKind::UnexpectedCondition => write!(f, "condition on a non-correction gate"),
            ViolationKind::ConditionInNonAdaptiveModel => {
                write!(f, "classical control in a non-adaptive circuit")
            }
            ViolationKind::Causality(id) => {
                write!(f, "causality: condition reads measurement {id} before it is taken")
            }
        }
    }
}

struct Checker<'a> {
    circuit: &'a AdaptiveCircuit,
    out: Vec<Violation>,
    step: usize,
    op: Option<usize>,
}

impl Checker<'_> {
    fn report(&mut self, kind: ViolationKind) {
        self.out.push(Violation {
            step: self.step,
            op: self.op,
            kind,
        });
    }

    fn point<'q>(&self, q: &'q Addr) -> Option<&'q GridPoint> {
        match q {
            Addr::Grid(p) if self.circuit.model.is_grid() => Some(p),
            _ => None,
        }
    }

    fn check_address(&mut self, q: &Addr) {
        let model = self.circuit.model;
        match (q, model.is_grid()) {
            (Addr::Grid(p), true) => {
                if p.dim() != self.circuit.dim {
                    self.report(ViolationKind::AddressKind(q.to_string()));
                } else if let Some(side) = self.circuit.grid_side {
                    if p.coords().iter().any(|&c| c < 0 || c >= side as i64) {
                        self.report(ViolationKind::OutOfGrid(q.to_string()));
                    }
                }
            }
            (Addr::Index(_), false) => {}
            _ => self.report(ViolationKind::AddressKind(q.to_string())),
        }
    }

    fn check_locality(&mut self, op: &BasicOp) {
        let pts: Option<Vec<&GridPoint>> = op.qubits.iter().map(|q| self.point(q)).collect();
        let Some(pts) = pts else { return };
        if pts.len() == 2 {
            if !pts[0].is_adjacent(pts[1]) {
                self.report(ViolationKind::NotAdjacent(pts[0].to_string(), pts[1].to_string()));
            }
        } else if pts.len() > 2 {
            let hub = match op.gate {
                Gate::Fanout { .. } => 0,
                _ => pts.len() - 1,
            };
            let local = pts
                .iter()
                .enumerate()
                .all(|(i, p)| i == hub || p.is_adjacent(pts[hub]));
            if !local {
                self.report(ViolationKind::NotStar);
            }
        }
    }

    fn check_op(&mut self, step: &Timestep, op: &BasicOp) {
        let arity = op.gate.arity();
        if op.qubits.len() != arity {
            self.report(ViolationKind::Arity {
                expected: arity,
                found: op.qubits.len(),
            });
        }
        match &op.gate {
            Gate::Mcx { controls: 0 } | Gate::Mcu { controls: 0, .. } | Gate::Fanout { targets: 0 } => {
                self.report(ViolationKind::EmptyGate)
            }
            _ => {}
        }
        match &op.gate {
            Gate::U { matrix: u } | Gate::Mcu { u, .. } if !u.is_unitary() => {
                self.report(ViolationKind::NonUnitary)
            }
            _ => {}
        }
        let mut seen = HashSet::new();
        for q in &op.qubits {
            self.check_address(q);
            if !seen.insert(q) {
                self.report(ViolationKind::DuplicateQubit(q.to_string()));
            }
        }
        let classical = matches!(op.gate, Gate::Measure | Gate::PauliCorrection);
        match step.kind {
            StepKind::Physical if arity > 2 => self.report(ViolationKind::NonBasicInPhysicalStep),
            StepKind::Logical if arity > MAX_LOGICAL_ARITY => {
                self.report(ViolationKind::TooWide(arity))
            }
            StepKind::Logical if classical => self.report(ViolationKind::ClassicalInLogicalStep),
            _ => {}
        }
        if op.qubits.len() == arity {
            self.check_locality(op);
        }
        match (&op.gate, op.measurement_id) {
            (Gate::Measure, None) => self.report(ViolationKind::MissingMeasurementId),
            (g, Some(_)) if *g != Gate::Measure => {
                self.report(ViolationKind::UnexpectedMeasurementId)
            }
            _ => {}
        }
        match (&op.gate, &op.condition) {
            (Gate::PauliCorrection, None) => self.report(ViolationKind::MissingCondition),
            (g, Some(_)) if *g != Gate::PauliCorrection => {
                self.report(ViolationKind::UnexpectedCondition)
            }
            _ => {}
        }
        if op.condition.is_some() && !self.circuit.model.is_adaptive() {
            self.report(ViolationKind::ConditionInNonAdaptiveModel);
        }
    }
}

/// Check every structural rule of the circuit's model; empty means valid.
pub fn validate(circuit: &AdaptiveCircuit) -> Vec<Violation> {
    let mut ck = Checker {
        circuit,
        out: Vec::new(),
        step: 0,
        op: None,
    };
    let mut defined: HashSet<MeasurementId> = HashSet::new();
    for (s, step) in circuit.timesteps.iter().enumerate() {
        ck.step = s;
        let mut used = HashSet::new();
        let mut new_ids = Vec::new();
        for (i, op) in step.ops.iter().enumerate() {
            ck.op = Some(i);
            ck.check_op(step, op);
            for q in &op.qubits {
                if !used.insert(q) {
                    ck.report(ViolationKind::Overlap(q.to_string()));
                }
            }
            if let Some(cond) = &op.condition {
                for id in cond.ids() {
                    if !defined.contains(&id) {
                        ck.report(ViolationKind::Causality(id.0));
                    }
                }
            }
            if let Some(id) = op.measurement_id {
                if id.0 >= circuit.measurement_count {
                    ck.report(ViolationKind::MeasurementOutOfRange(id.0));
                }
                if defined.contains(&id) || new_ids.contains(&id) {
                    ck.report(ViolationKind::DuplicateMeasurement(id.0));
                }
                new_ids.push(id);
            }
        }
        defined.extend(new_ids);
    }
    ck.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ClassicalCondition, Model};

    fn p(x: i64, y: i64) -> Addr {
        Addr::Grid(GridPoint::xy(x, y))
    }

    fn grid(steps: Vec<Timestep>) -> AdaptiveCircuit {
        AdaptiveCircuit {
            timesteps: steps,
            ..AdaptiveCircuit::new(Model::Ccntc, 2)
        }
    }

    #[test]
    fn adjacency_and_overlap() {
        let ok = grid(vec![Timestep::physical(vec![
            BasicOp::cnot(p(0, 0), p(0, 1)),
            BasicOp::swap(p(1, 0), p(1, 1)),
        ])]);
        assert!(validate(&ok).is_empty());
        let far = grid(vec![Timestep::physical(vec![BasicOp::cnot(p(0, 0), p(1, 1))])]);
        assert!(matches!(validate(&far)[0].kind, ViolationKind::NotAdjacent(..)));
        let overlap = grid(vec![Timestep::physical(vec![
            BasicOp::cnot(p(0, 0), p(0, 1)),
            BasicOp::single(Gate::H, p(0, 1)),
        ])]);
        assert!(matches!(validate(&overlap)[0].kind, ViolationKind::Overlap(_)));
    }

    #[test]
    fn star_locality_for_logical_gates() {
        let star = grid(vec![Timestep::logical(vec![BasicOp::mcx(
            vec![p(0, 1), p(1, 0), p(2, 1)],
            p(1, 1),
        )])]);
        assert!(validate(&star).is_empty());
        let bent = grid(vec![Timestep::logical(vec![BasicOp::mcx(vec![p(0, 1), p(2, 2)], p(1, 1))])]);
        assert_eq!(validate(&bent)[0].kind, ViolationKind::NotStar);
        let physical = grid(vec![Timestep::physical(vec![BasicOp::mcx(
            vec![p(0, 1), p(1, 0)],
            p(1, 1),
        )])]);
        assert_eq!(validate(&physical)[0].kind, ViolationKind::NonBasicInPhysicalStep);
    }

    #[test]
    fn causality() {
        let cond = ClassicalCondition {
            x_parity_of: [MeasurementId(0)].into(),
            z_parity_of: Default::default(),
        };
        let mut c = grid(vec![Timestep::physical(vec![
            BasicOp::measure(p(0, 0), MeasurementId(0)),
            BasicOp::correction(p(0, 1), cond.clone()),
        ])]);
        c.measurement_count = 1;
        assert_eq!(validate(&c)[0].kind, ViolationKind::Causality(0));
        c.timesteps = vec![
            Timestep::physical(vec![BasicOp::measure(p(0, 0), MeasurementId(0))]),
            Timestep::physical(vec![BasicOp::correction(p(0, 1), cond)]),
        ];
        assert!(validate(&c).is_empty());
        c.model = Model::Nantc;
        assert_eq!(validate(&c)[0].kind, ViolationKind::ConditionInNonAdaptiveModel);
    }

    #[test]
    fn abstract_model_uses_indices() {
        let mut c = AdaptiveCircuit::new(Model::Ccac, 0);
        c.timesteps = vec![Timestep::physical(vec![BasicOp::cnot(0usize, 5usize)])];
        assert!(validate(&c).is_empty());
        c.timesteps = vec![Timestep::physical(vec![BasicOp::cnot(0usize, p(0, 0))])];
        assert!(matches!(validate(&c)[0].kind, ViolationKind::AddressKind(_)));
    }
}
