use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("matrix is not symmetric: max asymmetry {0:e}")]
    NotSymmetric(f64),

    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),

    #[error("density matrix trace {0} differs from 1")]
    BadTrace(f64),

    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("transform is not symplectic: max |S^T Omega S - Omega| = {0:e}")]
    NotSymplectic(f64),

    #[error("non-physical variance matrix: {0}")]
    NonPhysical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
