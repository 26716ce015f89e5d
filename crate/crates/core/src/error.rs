use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClockError {
    #[error("dimension mismatch: state has {state}, operator has {operator}")]
    DimensionMismatch { state: usize, operator: usize },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular expression at t = {t}: {what}")]
    Singular { t: f64, what: String },

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid experiment config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ClockError>;
