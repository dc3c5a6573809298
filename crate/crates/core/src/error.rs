use thiserror::Error;

/// Errors raised while building bases, model matrices, or running a design search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid breakpoint grid: {0}")]
    InvalidGrid(String),

    #[error("t = {t} lies outside the basis domain [{lower}, {upper}]")]
    OutOfDomain { t: f64, lower: f64, upper: f64 },

    #[error("basis domains differ: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(f64, f64, f64, f64),

    #[error("unsupported basis pairing: {0}")]
    UnsupportedPairing(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value {value} outside bounds [{lower}, {upper}] ({what})")]
    OutOfBounds {
        what: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),

    #[error("model is not identifiable: {0}")]
    Identifiability(String),

    #[error("information matrix is singular or numerically unidentifiable")]
    Singular,

    #[error("design is infeasible: {0}")]
    Infeasible(String),

    #[error("instance too large for exhaustive enumeration: {coordinates} coordinates (limit {limit})")]
    InstanceTooLarge { coordinates: usize, limit: usize },

    #[error("all {starts} random starts ended infeasible")]
    AllStartsInfeasible { starts: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
