use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("special function argument {re}{im:+}i out of range: {reason}")]
    Range { re: f64, im: f64, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("profile degree {0} exceeds the cap of {cap}", cap = crate::polyexp::MAX_DEGREE)]
    DegreeCap(usize),

    #[error("order {requested} not available (computed up to {available})")]
    Order { requested: usize, available: usize },

    #[error("singular system for mode n={n} ({family}) at delta={delta}")]
    Singular { n: usize, family: &'static str, delta: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("mode n={n} {polarization} at delta={delta}, k={k}: {source}")]
    Solve { n: usize, polarization: &'static str, delta: f64, k: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
