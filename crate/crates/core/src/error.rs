use thiserror::Error;

/// Errors raised by circuit construction, simulation and lowering.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} used more than once by a single gate")]
    OverlappingQubits(usize),

    #[error("matrix payload is not unitary (max deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{requested} qubits exceed the limit of {limit}")]
    QubitLimitExceeded { requested: usize, limit: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("sum register of {size} qubits cannot hold the maximum sum {max_sum}")]
    RegisterOverflow { size: usize, max_sum: u64 },

    #[error("matrix gate has no registered circuit realization")]
    MissingRealization,

    #[error("unknown marker `{0}`")]
    UnknownMarker(String),
}

impl Error {
    /// Short stable identifier used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QubitOutOfRange { .. } => "qubit_out_of_range",
            Error::OverlappingQubits(_) => "overlapping_qubits",
            Error::NonUnitary { .. } => "non_unitary",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::QubitLimitExceeded { .. } => "qubit_limit_exceeded",
            Error::NotNormalized { .. } => "not_normalized",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::RegisterOverflow { .. } => "register_overflow",
            Error::MissingRealization => "missing_realization",
            Error::UnknownMarker(_) => "unknown_marker",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
