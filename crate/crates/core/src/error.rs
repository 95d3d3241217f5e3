use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry buffer has length {len}, expected {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, len: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr:.15})")]
    NotNormalized { norm_sqr: f64 },

    #[error("density matrix has trace {trace:.15}, expected 1")]
    BadTrace { trace: f64 },

    #[error("expected {expected} qubits, got {actual}")]
    Arity { expected: usize, actual: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("invalid qubit subset: {0}")]
    QubitSubset(String),

    #[error("projection onto a branch with probability {probability:.3e}")]
    ZeroBranch { probability: f64 },

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("state is not pure (purity {purity:.15})")]
    NotPure { purity: f64 },

    #[error("{0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
