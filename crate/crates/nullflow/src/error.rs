use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("elliptic parameter {0} outside (0, 1)")]
    EllipticParameter(f64),
    #[error("heun argument z = {0} exceeds 1")]
    HeunArgument(f64),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    MaxSteps { t: f64 },
    #[error("output node {t} is not monotone from the start point")]
    UnorderedNodes { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeunError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("series continuation did not converge toward z = {z}")]
    NonConvergence { z: f64 },
    #[error("one-sided limit at z = 1 unstable (spread {spread:e})")]
    LimitUnstable { spread: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("polynomial is not a total divergence")]
    NotATotalDivergence,
    #[error("jet has {given} entries but order {order} needs {needed}", needed = order + 1)]
    InsufficientJet { given: usize, order: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LameError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Heun(#[from] HeunError),
    #[error("only {found} of {wanted} eigenvalues found below h = {ceiling}")]
    SearchExhausted { found: usize, wanted: usize, ceiling: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KdvError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("value {0} outside the range of g on (0, 1)")]
    OutOfRange(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Lame(#[from] LameError),
    #[error(transparent)]
    Kdv(#[from] KdvError),
    #[error("bivector is degenerate")]
    DegenerateBivector,
    #[error("grid too coarse: need at least {needed} uniform samples")]
    GridTooCoarse { needed: usize },
    #[error("bending is not periodic: mismatch {mismatch:e}")]
    NotPeriodicBending { mismatch: f64 },
    #[error("KdV residual {residual:e} exceeds gate {gate:e}")]
    KdvResidualTooLarge { residual: f64, gate: f64 },
    #[error("no sign change over the scan bracket")]
    NoSignChange,
    #[error("invalid pair ({m}, {n}): need coprime m > n >= 1")]
    InvalidPair { m: i64, n: i64 },
}
