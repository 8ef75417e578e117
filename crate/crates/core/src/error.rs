use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid Pauli text `{text}`: {msg}")]
    Pauli { text: String, msg: String },

    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("unsupported qubit count {0} (1..=64)")]
    QubitCount(usize),

    #[error("terms do not pairwise commute: {0} and {1}")]
    NotCommuting(String, String),

    #[error("circuit does not diagonalize {0}")]
    NotDiagonalizing(String),

    #[error("electron count {n_electrons} must be in 1..={n_qubits}")]
    Electrons { n_electrons: usize, n_qubits: usize },

    #[error("expected {expected} parameters, got {got}")]
    ParamLength { expected: usize, got: usize },

    #[error("expectation has imaginary residue {0:e}; operator is not Hermitian")]
    NonHermitian(f64),

    #[error("dense operator on {0} qubits exceeds the size guard of {1}")]
    SizeGuard(usize, usize),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("{groups} groups but {diagonalizers} diagonalizers")]
    Misaligned { groups: usize, diagonalizers: usize },

    #[error("Hamiltonian has no non-identity terms")]
    IdentityOnly,

    #[error("empty Hamiltonian")]
    Empty,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
