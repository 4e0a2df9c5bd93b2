//! Circuit representation shared by every model.
//!
//! A circuit is a list of timesteps. Physical timesteps hold basic operations
//! (arity at most two); logical timesteps may hold small multi-qubit gates
//! that are expanded into physical steps before depth and size are measured.

mod expand;
mod gate;
mod metrics;
mod validate;

pub use expand::{decompose_logical, expand_to_physical, peephole, schedule_asap};
pub use gate::{Gate, Mat2};
pub use metrics::{depth, qubits_touched, size, width};
pub use validate::{validate, Violation, ViolationKind, MAX_LOGICAL_ARITY};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::GridPoint;

/// A qubit: a lattice point in grid models or an index in the abstract model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Addr {
    Index(usize),
    Grid(GridPoint),
}

impl Addr {
    pub fn grid(&self) -> Option<&GridPoint> {
        match self {
            Addr::Grid(p) => Some(p),
            Addr::Index(_) => None,
        }
    }
}

impl From<GridPoint> for Addr {
    fn from(p: GridPoint) -> Self {
        Addr::Grid(p)
    }
}

impl From<&GridPoint> for Addr {
    fn from(p: &GridPoint) -> Self {
        Addr::Grid(p.clone())
    }
}

impl From<usize> for Addr {
    fn from(i: usize) -> Self {
        Addr::Index(i)
    }
}

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Addr::Index(i) => write!(f, "q{i}"),
            Addr::Grid(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementId(pub u32);

/// Condition of a Pauli correction: apply `X` when the XOR of the listed
/// `x` outcomes is one, then `Z` likewise. The applied operator is
/// `X^x Z^z`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalCondition {
    pub x_parity_of: BTreeSet<MeasurementId>,
    pub z_parity_of: BTreeSet<MeasurementId>,
}

impl ClassicalCondition {
    pub fn ids(&self) -> impl Iterator<Item = MeasurementId> + '_ {
        self.x_parity_of.iter().chain(&self.z_parity_of).copied()
    }

    /// Resolve against recorded outcomes into `(apply_x, apply_z)`.
    pub fn resolve(&self, lookup: impl Fn(MeasurementId) -> Option<bool>) -> Result<(bool, bool)> {
        let parity = |set: &BTreeSet<MeasurementId>| -> Result<bool> {
            set.iter().try_fold(false, |acc, id| {
                lookup(*id)
                    .map(|b| acc ^ b)
                    .ok_or(Error::UnknownMeasurement(id.0))
            })
        };
        Ok((parity(&self.x_parity_of)?, parity(&self.z_parity_of)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicOp {
    #[serde(flatten)]
    pub gate: Gate,
    pub qubits: Vec<Addr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ClassicalCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement_id: Option<MeasurementId>,
}

impl BasicOp {
    pub fn new(gate: Gate, qubits: Vec<Addr>) -> Self {
        Self {
            gate,
            qubits,
            condition: None,
            measurement_id: None,
        }
    }

    pub fn single(gate: Gate, q: impl Into<Addr>) -> Self {
        Self::new(gate, vec![q.into()])
    }

    pub fn cnot(control: impl Into<Addr>, target: impl Into<Addr>) -> Self {
        Self::new(Gate::Cnot, vec![control.into(), target.into()])
    }

    pub fn swap(a: impl Into<Addr>, b: impl Into<Addr>) -> Self {
        Self::new(Gate::Swap, vec![a.into(), b.into()])
    }

    /// Multi-controlled X; the target is the last qubit.
    pub fn mcx(controls: Vec<Addr>, target: impl Into<Addr>) -> Self {
        let c = controls.len();
        let mut qubits = controls;
        qubits.push(target.into());
        Self::new(Gate::Mcx { controls: c }, qubits)
    }

    pub fn mcu(controls: Vec<Addr>, target: impl Into<Addr>, u: Mat2) -> Self {
        let c = controls.len();
        let mut qubits = controls;
        qubits.push(target.into());
        Self::new(Gate::Mcu { controls: c, u }, qubits)
    }

    /// Copy `source` into each target by XOR.
    pub fn fanout(source: impl Into<Addr>, targets: Vec<Addr>) -> Self {
        let t = targets.len();
        let mut qubits = vec![source.into()];
        qubits.extend(targets);
        Self::new(Gate::Fanout { targets: t }, qubits)
    }

    pub fn measure(q: impl Into<Addr>, id: MeasurementId) -> Self {
        Self {
            measurement_id: Some(id),
            ..Self::single(Gate::Measure, q)
        }
    }

    pub fn correction(q: impl Into<Addr>, condition: ClassicalCondition) -> Self {
        Self {
            condition: Some(condition),
            ..Self::single(Gate::PauliCorrection, q)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Physical,
    Logical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timestep {
    pub kind: StepKind,
    pub ops: Vec<BasicOp>,
}

impl Timestep {
    pub fn physical(ops: Vec<BasicOp>) -> Self {
        Self {
            kind: StepKind::Physical,
            ops,
        }
    }

    pub fn logical(ops: Vec<BasicOp>) -> Self {
        Self {
            kind: StepKind::Logical,
            ops,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "NANTC")]
    Nantc,
    #[serde(rename = "CCAC")]
    Ccac,
    #[serde(rename = "CCNTC")]
    Ccntc,
}

impl Model {
    pub fn is_grid(self) -> bool {
        !matches!(self, Model::Ccac)
    }

    pub fn is_adaptive(self) -> bool {
        !matches!(self, Model::Nantc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveCircuit {
    pub model: Model,
    /// Lattice dimension for grid models, zero for the abstract model.
    pub dim: usize,
    pub grid_side: Option<usize>,
    pub n_inputs: usize,
    pub measurement_count: u32,
    pub timesteps: Vec<Timestep>,
}

impl AdaptiveCircuit {
    pub fn new(model: Model, dim: usize) -> Self {
        Self {
            model,
            dim,
            grid_side: None,
            n_inputs: 0,
            measurement_count: 0,
            timesteps: Vec::new(),
        }
    }

    pub fn ops(&self) -> impl Iterator<Item = &BasicOp> {
        self.timesteps.iter().flat_map(|s| s.ops.iter())
    }

    /// Every qubit named by some operation, in sorted order.
    pub fn qubits(&self) -> BTreeSet<Addr> {
        self.ops().flat_map(|op| op.qubits.iter().cloned()).collect()
    }

    pub fn extend_from(&mut self, other: &AdaptiveCircuit) {
        self.timesteps.extend(other.timesteps.iter().cloned());
    }
}

/// Incremental construction of circuits with measurement-id bookkeeping.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    circuit: AdaptiveCircuit,
    last_measurement: HashMap<Addr, MeasurementId>,
}

impl CircuitBuilder {
    pub fn new(model: Model, dim: usize) -> Self {
        Self {
            circuit: AdaptiveCircuit::new(model, dim),
            last_measurement: HashMap::new(),
        }
    }

    pub fn model(&self) -> Model {
        self.circuit.model
    }

    pub fn dim(&self) -> usize {
        self.circuit.dim
    }

    pub fn set_grid_side(&mut self, side: usize) -> &mut Self {
        self.circuit.grid_side = Some(side);
        self
    }

    pub fn set_inputs(&mut self, n: usize) -> &mut Self {
        self.circuit.n_inputs = n;
        self
    }

    pub fn push(&mut self, step: Timestep) {
        self.circuit.timesteps.push(step);
    }

    pub fn physical(&mut self, ops: Vec<BasicOp>) {
        self.push(Timestep::physical(ops));
    }

    pub fn logical(&mut self, ops: Vec<BasicOp>) {
        self.push(Timestep::logical(ops));
    }

    /// Reserve the next measurement id for qubit `q`.
    pub fn allocate_measurement(&mut self, q: &Addr) -> MeasurementId {
        let id = MeasurementId(self.circuit.measurement_count);
        self.circuit.measurement_count += 1;
        self.last_measurement.insert(q.clone(), id);
        id
    }

    /// Most recent measurement allocated on `q`.
    pub fn last_measurement(&self, q: &Addr) -> Option<MeasurementId> {
        self.last_measurement.get(q).copied()
    }

    pub fn len(&self) -> usize {
        self.circuit.timesteps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuit.timesteps.is_empty()
    }

    pub fn finish(self) -> AdaptiveCircuit {
        self.circuit
    }
}
