use thiserror::Error;

/// Errors raised by the library.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type used by
/// the failing computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("{what} does not sum to one (sum = {sum})")]
    NotNormalized { what: String, sum: f64 },

    #[error("{what} has an invalid entry {value} at index {index}")]
    InvalidEntry { what: String, index: usize, value: f64 },

    #[error("invalid Rényi order {0}")]
    InvalidOrder(f64),

    #[error("order {order} outside the admissible range {range}")]
    OrderOutOfRange { order: f64, range: String },

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("axis error: {0}")]
    Axis(String),

    #[error("marginal of axis group {group:?} lacks full support (label {label})")]
    ZeroMarginal { group: Vec<usize>, label: String },

    #[error("invalid rate {0}: rates must be nonnegative")]
    InvalidRate(f64),

    #[error("divergence is infinite at order {order}")]
    InfiniteDivergence { order: f64 },

    #[error("log-likelihood variance vanishes; the second-order limit is a step function")]
    DegenerateVariance,

    #[error("enumeration of {count} items exceeds the configured cap {cap}")]
    CapacityExceeded { count: f64, cap: u64 },

    #[error("need at least {needed} usable points, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
