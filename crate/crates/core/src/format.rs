//! JSON interchange format for circuits.
//!
//! Field order is fixed and sets are sorted, so equal circuits serialize to
//! identical bytes. Qubits are coordinate arrays in grid models and plain
//! integers in the abstract model.

use serde::{Deserialize, Serialize};

use crate::circuit::{
    validate, AdaptiveCircuit, BasicOp, Mat2, Model, StepKind, Timestep,
};
use crate::error::{Error, Result};
use crate::teleport::{InteractionSpec, ReorderSpec};

pub const FORMAT_VERSION: &str = "1.0.0";

/// What a circuit was generated to do, so it can be checked later.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CircuitMeta {
    ControlledU { m: usize, dim: usize, u: Mat2 },
    Fanout { m: usize, dim: usize },
    Reorder { spec: ReorderSpec },
    Interact { spec: InteractionSpec },
    Ccac { source: Box<CircuitDocument> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub kind: StepKind,
    pub ops: Vec<BasicOp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub format_version: String,
    pub model: Model,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_side: Option<usize>,
    pub n_inputs: usize,
    pub measurement_count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<CircuitMeta>,
    pub timesteps: Vec<StepRecord>,
}

impl CircuitDocument {
    pub fn new(circuit: &AdaptiveCircuit, meta: Option<CircuitMeta>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            model: circuit.model,
            dim: circuit.dim,
            grid_side: circuit.grid_side,
            n_inputs: circuit.n_inputs,
            measurement_count: circuit.measurement_count,
            meta,
            timesteps: circuit
                .timesteps
                .iter()
                .map(|s| StepRecord {
                    kind: s.kind,
                    ops: s.ops.clone(),
                })
                .collect(),
        }
    }

    pub fn circuit(&self) -> AdaptiveCircuit {
        let mut c = AdaptiveCircuit::new(self.model, self.dim);
        c.grid_side = self.grid_side;
        c.n_inputs = self.n_inputs;
        c.measurement_count = self.measurement_count;
        c.timesteps = self
            .timesteps
            .iter()
            .map(|s| Timestep {
                kind: s.kind,
                ops: s.ops.clone(),
            })
            .collect();
        c
    }
}

pub fn serialize(circuit: &AdaptiveCircuit, meta: Option<CircuitMeta>) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&CircuitDocument::new(circuit, meta))
        .expect("circuit documents always serialize");
    out.push(b'\n');
    out
}

fn check_version(version: &str) -> Result<()> {
    let major = FORMAT_VERSION.split('.').next();
    if version.split('.').next() == major && version.split('.').count() == 3 {
        Ok(())
    } else {
        Err(Error::Version(version.into()))
    }
}

/// Parse and validate a document.
pub fn parse_document(bytes: &[u8]) -> Result<CircuitDocument> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(parse_error)?;
    if let Some(v) = value.get("format_version").and_then(|v| v.as_str()) {
        check_version(v)?;
    }
    let doc: CircuitDocument = serde_json::from_slice(bytes).map_err(parse_error)?;
    check_version(&doc.format_version)?;
    let violations = validate(&doc.circuit());
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    Ok(doc)
}

pub fn parse(bytes: &[u8]) -> Result<AdaptiveCircuit> {
    Ok(parse_document(bytes)?.circuit())
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}
