use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("curve is not constant-speed parametrized (speed spread {0:.3e})")]
    WrongParametrization(f64),
    #[error("exponent {0} outside (0, 1]")]
    InvalidExponent(f64),
    #[error("point lies on the curve")]
    PointOnCurve,
    #[error("window {h} outside (0, {max}]")]
    InvalidWindow { h: f64, max: f64 },
    #[error("kernel evaluated at the origin without mollification")]
    SingularEvaluation,
    #[error("evaluation point within {0:.3e} of a boundary")]
    TooCloseToBoundary(f64),
    #[error("step rejected: dt {dt:.3e} exceeds CFL limit {limit:.3e}")]
    StepRejected { dt: f64, limit: f64 },
    #[error("topology breach at t = {t}: {what}")]
    TopologyBreach { t: f64, what: String },
    #[error("config error: {0}")]
    ConfigError(String),
    #[error("mollification scale {0} too large for curve length")]
    ScaleTooLarge(f64),
    #[error("alignment flow stalled with residual {0:.3e}")]
    FlowStalled(f64),
    #[error("alignment map lost monotonicity")]
    MonotonicityLost,
    #[error("curve is not simple")]
    NotSimple,
    #[error("perturbation {eps:.3e} exceeds admissible {eps0:.3e}")]
    PerturbationTooLarge { eps: f64, eps0: f64 },
    #[error("curve leaves the upper half plane (min y = {0:.3e})")]
    OutOfHalfPlane(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
