use thiserror::Error;

/// Errors raised by the numerical routines and the file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("not positive definite: pivot {pivot:e} at row {row}")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix does not commute with the {algebra} structures (residual {residual:e})")]
    StructureViolation {
        algebra: &'static str,
        residual: f64,
    },

    #[error(
        "eigenvalue multiplicities are not divisible by {multiplicity} (cluster spread {spread:e})"
    )]
    Multiplicity { multiplicity: usize, spread: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("interpolation nodes must be distinct (node {0} repeated)")]
    DuplicateNodes(f64),

    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("series must start with constant term 1, found {0}")]
    SeriesConstant(f64),

    #[error("{what} out of range: {value} (allowed {allowed})")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: String,
    },

    #[error(
        "polynomial is not homogeneous: term {alpha:?} has degree {found}, expected {expected}"
    )]
    NotHomogeneous {
        alpha: Vec<u32>,
        found: u32,
        expected: u32,
    },

    #[error("base point lies on the zero set of the operator (F = {value:e})")]
    BaseOnZeroSet { value: f64 },

    #[error("point is outside the Garding cone (min eigenvalue {min_eigenvalue:e})")]
    OutsideCone { min_eigenvalue: f64 },

    #[error("operator space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("independent evaluation routes disagree: {first} vs {second}")]
    RouteMismatch { first: f64, second: f64 },

    #[error("no restart of the central-ray search converged (best residual {residual:e})")]
    SearchFailed { residual: f64 },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}
