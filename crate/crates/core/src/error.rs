use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence after {evaluations} evaluations (value {value:e}, error {error:e})")]
    NonConvergence { value: f64, error: f64, evaluations: usize },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("non-finite integrand at {at} (undeclared singularity)")]
    SingularInteriorUnhandled { at: f64 },
    #[error("tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBoundExceeded { bound: f64, tol: f64 },
    #[error("method unavailable: {0}")]
    MethodUnavailable(String),
    #[error("kernel is singular at x={x}, t={t}")]
    SingularPoint { x: f64, t: f64 },
    #[error("finite-difference step underflow at x={0}")]
    StepUnderflow(f64),
    #[error("ball family extends outside the grid extent {0}")]
    FamilyOutsideGrid(f64),
    #[error("growth condition failed: {0}")]
    GrowthConditionFailed(String),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("function mean {0:e} is not zero, not in the Hardy space")]
    MeanNotZero(f64),
    #[error("frequency projection failed: {0}")]
    FrequencyProjectionFailed(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
