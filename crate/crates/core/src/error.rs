use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("site {site} out of range for a {n_sites}-site space")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid site list: {0}")]
    InvalidSites(String),

    #[error("operator is not hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("basis is not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("negative rate {rate} on jump {index}")]
    NegativeRate { index: usize, rate: f64 },

    #[error("dense storage limited to total_dim <= {limit}, got {dim}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("spectral gap is absent (no eigenvalue outside the kernel cluster)")]
    NoGap,

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst:e})")]
    NoConvergence {
        iterations: usize,
        worst: f64,
        residuals: Vec<f64>,
    },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("basis overflow: {0}")]
    BasisOverflow(String),

    #[error("positivity violated at t = {t}: min eigenvalue {min_eig:e} (step {dt})")]
    PositivityViolation { t: f64, min_eig: f64, dt: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
