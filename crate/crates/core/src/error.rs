use thiserror::Error;

/// Errors raised by the approximation pipelines and their building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid expression: {0}")]
    InvalidExpr(String),

    #[error("origin is not an interior point of the body")]
    OriginNotInterior,

    #[error("grid is empty")]
    EmptyGrid,

    #[error("expression is not smooth (contains a max node)")]
    NotSmooth,

    #[error("restriction to the chord is not convex (violation {violation:e})")]
    RestrictionNotConvex { violation: f64 },

    #[error("input is not convex: {0}")]
    InputNotConvex(String),

    #[error("generator {index} is too coarse: error {error:e} is not below {bound:e}")]
    ApproximantsTooCoarse { index: usize, error: f64, bound: f64 },

    #[error("shifted polynomial is not coordinatewise nondecreasing (violation {violation:e})")]
    MonotonicityFailed { violation: f64 },

    #[error(
        "no degree up to {cap} certified (best value error {best_value_error:e}, \
         best curvature error {best_curvature_error:e})"
    )]
    DegreeCapExceeded {
        cap: usize,
        best_value_error: f64,
        best_curvature_error: f64,
    },

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("no sign change of the gap map found")]
    NoSignChangeFound,

    #[error("not converged (residual {residual:e})")]
    NotConverged { residual: f64 },

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("linear program unbounded")]
    Unbounded,

    #[error("numerically degenerate: {0}")]
    NumericallyDegenerate(String),

    #[error("certificate failed: {clause}: {detail}")]
    CertificateFailed { clause: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
