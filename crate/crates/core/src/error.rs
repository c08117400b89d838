use thiserror::Error;

/// Errors produced by the approximate-state library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCountMismatch { expected: usize, found: usize },
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("invalid Pauli character {0:?}")]
    InvalidPauliChar(char),
    #[error("number of qubits must be positive")]
    NoQubits,
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("observable has zero seminorm and cannot be normalized")]
    ZeroSeminorm,
    #[error("{what}: {n} qubits exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("probability {0} is outside [0, 1)")]
    InvalidProbability(f64),
    #[error("two-qubit gate needs distinct targets, got {0} twice")]
    EqualTargets(usize),
    #[error("XY angle {0} is outside [0, 2pi)")]
    InvalidAngle(f64),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("outcome must be +1 or -1, got {0}")]
    InvalidOutcome(i64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("bad snapshot file magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot format version {0}")]
    UnsupportedVersion(u16),
    #[error("snapshot data truncated: needed {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },
    #[error("malformed snapshot data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
