use thiserror::Error;

use crate::circuit::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("points have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("qubits {0} and {1} are not adjacent")]
    NotAdjacent(String, String),
    #[error("circuit is invalid: {}", summarize(.0))]
    Invalid(Vec<Violation>),
    #[error("unsupported gate for this simulator: {0}")]
    UnsupportedGate(String),
    #[error("qubit {0} is not known to the simulator")]
    UnknownQubit(String),
    #[error("measurement {0} has not been recorded")]
    UnknownMeasurement(u32),
    #[error("qubit {0} was never measured, cannot reset")]
    NotMeasured(String),
    #[error("scripted outcome for measurement {0} has zero probability")]
    ImpossibleOutcome(u32),
    #[error("too many qubits for dense simulation: {0}")]
    TooManyQubits(usize),
    #[error("step rejected by device: {}", summarize(.0))]
    Rejected(Vec<Violation>),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0}")]
    Version(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn summarize(violations: &[Violation]) -> String {
    match violations {
        [] => "no violations".into(),
        [v] => v.to_string(),
        [v, rest @ ..] => format!("{v} (and {} more)", rest.len()),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
