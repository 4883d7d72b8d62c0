use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} PoDs, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid traffic matrix: {0}")]
    InvalidTraffic(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid routing: {0}")]
    InvalidRouting(String),

    #[error("utilization must be positive and finite, got {0}")]
    InvalidUtilization(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// No topology within the port budgets carries the loads.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("demand {src} -> {dst} has no usable path")]
    Unroutable { src: usize, dst: usize },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("seed solution infeasible: {0}")]
    SeedInfeasible(String),

    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
