use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("simulation infeasible: {0}")]
    Infeasible(String),
    #[error("postselection retained no shots ({context})")]
    EmptyPostselection { context: String },
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { expected: usize, got: usize },
    #[error("circuit is not an FLO circuit: onsite angle {0} is nonzero")]
    NotFlo(f64),
    #[error("circuit is not in native form: found {0}")]
    NotNative(String),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitRange { index: usize, n_qubits: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::Unsupported(_) | Error::ParamLength { .. } => 2,
            Error::Infeasible(_) => 3,
            Error::EmptyPostselection { .. } => 4,
            _ => 1,
        }
    }
}
