use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A request would exceed the dense-storage qubit cap for its mode.
    #[error("resource limit exceeded: {context} needs {requested} qubits, cap is {cap}")]
    ResourceLimit {
        context: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid qubit selection: {0}")]
    InvalidQubits(String),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate {gate} takes {expected} parameter(s), got {found}")]
    ParamCount {
        gate: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("gate {gate} has a non-finite angle")]
    NonFiniteAngle { gate: &'static str },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Semantic problem in a circuit grid. `row` is the qubit, `column` the stage.
    #[error("circuit error{}: {message}", location(*.row, *.column))]
    Circuit {
        row: Option<usize>,
        column: Option<usize>,
        message: String,
    },

    #[error("error rate p = {p} outside [0, {max}] for {qubits} qubit(s)")]
    NoiseRate { p: f64, max: f64, qubits: usize },

    #[error("invalid factorization problem: {0}")]
    Factorization(String),

    #[error("invalid ansatz configuration: {0}")]
    Ansatz(String),
}

fn location(row: Option<usize>, column: Option<usize>) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!(" at qubit {r}, stage {c}"),
        (Some(r), None) => format!(" at qubit {r}"),
        (None, Some(c)) => format!(" at stage {c}"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn circuit(
        row: Option<usize>,
        column: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::Circuit {
            row,
            column,
            message: message.into(),
        }
    }
}
