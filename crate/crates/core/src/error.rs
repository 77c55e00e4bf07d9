use thiserror::Error;

/// Errors raised by the toolkit. Each variant names the precondition that failed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("principal logarithm is ill-conditioned (dexp smallest singular value {sigma:.3e})")]
    CutLocus { sigma: f64 },
    #[error("polynomial of degree {expected} received {got} arguments")]
    ArityMismatch { expected: usize, got: usize },
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("exterior derivative of a top-degree form (degree {degree} on a {dim}-dimensional chart)")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("forms or chains live on different charts")]
    ChartMismatch,
    #[error("value kinds incompatible with the requested product: {0}")]
    KindMismatch(String),
    #[error("form of degree {form} cannot be integrated over cells of dimension {cell}")]
    DegreeMismatch { form: usize, cell: usize },
    #[error("loop is not closed: endpoint gap {gap:.3e}")]
    OpenLoop { gap: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("gauge defect is not an integer: raw shift {raw:.6}, residual {residual:.3e}")]
    NonIntegerDefect { raw: f64, residual: f64 },
    #[error("connection family is not flat (sup |F| = {sup:.3e})")]
    NotFlat { sup: f64 },
    #[error("form or connection is not invariant under the symmetry (defect {defect:.3e})")]
    NotInvariant { defect: f64 },
    #[error("unsupported bundle: {0}")]
    UnsupportedBundle(String),
    #[error("flat search did not converge after {iterations} iterations (best residual {best:.3e})")]
    NoConvergence { iterations: usize, best: f64 },
    #[error("tangent vectors live at different points")]
    PointMismatch,
    #[error("hypothesis violated: pullback of curvature differs from d(lambda) by {defect:.3e}")]
    HypothesisViolated { defect: f64 },
    #[error("path does not lift to a closed loop in the quotient: {0}")]
    NonLiftable(String),
    #[error("loop passes within {distance:.3e} of a reducible corner (margin {margin})")]
    CornerTooClose { distance: f64, margin: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
