use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid number literal {0:?}")]
    Number(String),

    #[error("invalid problem: {0}")]
    Problem(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("curve shape mismatch: {0}")]
    Shape(String),

    /// The linear boundary system has no unique solution.
    #[error("singular boundary configuration (denominator {denominator:e})")]
    Singular { denominator: f64 },

    #[error("gamma is undefined: 2T - alpha(beta+1)eta^2 = {value} is not positive")]
    GammaDomain { value: String },

    #[error("f({t}, {u}) failed: {reason}")]
    Evaluation { t: f64, u: f64, reason: String },

    #[error("u = {u:e} at t = {t} is outside the domain of f")]
    NegativeState { t: f64, u: f64 },

    #[error("invalid function spec: {0}")]
    Spec(String),

    #[error("invalid threshold triple: {0}")]
    Thresholds(String),
}
