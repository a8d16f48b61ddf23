use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit labels overlap: {0:?}")]
    OverlappingLabels(Vec<String>),

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),

    #[error("amplitude vector of length {len} does not match {qubits} qubits")]
    BadLength { len: usize, qubits: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("measurement basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("measurement basis has {got} states, expected {expected}")]
    IncompleteBasis { got: usize, expected: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("partial trace needs a non-empty set of kept qubits")]
    EmptyKeep,

    #[error("Bell outcome index {0} out of range 1..=4")]
    OutcomeOutOfRange(u8),

    #[error("invalid unitary family: {0}")]
    InvalidFamily(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("protocol misuse: {0}")]
    Protocol(String),

    #[error("model {model} is invalid here: {reason}")]
    ModelDomain { model: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
