use thiserror::Error;

/// Errors surfaced by state, planning and scheduling operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QubusError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit index {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("bus is still entangled (max |alpha| = {max_alpha:.3e})")]
    BusEntangled { max_alpha: f64 },

    #[error("dimension mismatch: state has {state} qubits, expected {expected}")]
    DimensionMismatch { state: usize, expected: usize },

    #[error("incomplete phase table: {0}")]
    IncompletePhaseTable(String),

    #[error("lattice too large for exhaustive search: {qubits} qubits exceeds limit {limit}")]
    SearchTooLarge { qubits: usize, limit: usize },

    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),
}

pub type Result<T> = std::result::Result<T, QubusError>;
