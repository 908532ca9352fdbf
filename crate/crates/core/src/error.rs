use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (residue {residue:e})")]
    NonHermitian { residue: f64 },
    #[error("input is not Hermitian: imaginary residue {residue:e} in coherence {index}")]
    NonHermitianInput { index: String, residue: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },
    #[error("bad ket symbol {0:?}; expected one of 0, 1, +, -")]
    BadSymbol(char),
    #[error("ket string must have length 3, got {0}")]
    BadLength(usize),
    #[error("bad Pauli index {0}")]
    BadIndex(String),
    #[error("invalid mixture weights: {0}")]
    WeightError(String),
    #[error("bad qubit subset {0:?}")]
    BadSubset(Vec<usize>),
    #[error("ancilla trace component must be 1/sqrt(2), got {0}")]
    BadAncilla(f64),
    #[error("kets {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("expected {expected} kets, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("ket {0} has no product form")]
    NotProduct(usize),
    #[error("rotation axis must be 333 or 222, got {0}")]
    BadAxis(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("no candidate evolution reaches the target state")]
    NoMatch,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
