use thiserror::Error;

pub type Result<T> = std::result::Result<T, BlackboxError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlackboxError {
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { name: String, line: usize },

    #[error("line {line}: qubit index {index} out of range for {qubits} qubit(s)")]
    BadIndex { index: usize, qubits: usize, line: usize },

    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },

    #[error("gate {gate} on qubits {qubits:?} has no realization for that connectivity")]
    NotConnected { gate: String, qubits: Vec<usize> },

    #[error("drive for {gate} reaches fidelity {fidelity:.9} with its target unitary")]
    GateRealizationMismatch { gate: String, fidelity: f64 },

    #[error("empty job: {0}")]
    EmptyJob(String),

    #[error("circuit uses {requested} qubits but the device has {available}")]
    TooManyQubits { requested: usize, available: usize },

    #[error("device config: {0}")]
    Config(String),

    #[error("job result text: {0}")]
    ResultFormat(String),

    #[error(transparent)]
    Dynamics(#[from] qslprobe_core::Error),
}
