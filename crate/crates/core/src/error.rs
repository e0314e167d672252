use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation at a point where the function is not defined (typically the origin).
    #[error("domain error: {what} is undefined at {point:?}")]
    Domain { what: &'static str, point: Vec<f64> },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A hypothesis of the decay theorem is not met by the supplied phase/symbol.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parameter {parameter} = {value} outside admissible interval {interval}")]
    ParameterRange {
        parameter: &'static str,
        value: String,
        interval: String,
    },

    #[error("({inv_p}, {inv_q}) lies outside the admissible quadrangle")]
    RegionMembership { inv_p: String, inv_q: String },

    #[error("empty interval: {0}")]
    EmptyInterval(String),

    #[error("lattice spacing {spacing} rejected; spacing must be below {max_spacing}")]
    ResolutionRejected { spacing: f64, max_spacing: f64 },

    #[error("lattice needs {points} points, budget is {budget}")]
    Budget { points: u64, budget: u64 },

    #[error(
        "{method} did not converge: reached {reached} after {pieces} pieces, tail bound {tail_bound}"
    )]
    NonConvergence {
        method: &'static str,
        reached: f64,
        pieces: usize,
        tail_bound: f64,
    },

    #[error("unsupported Bessel order {0}")]
    UnsupportedOrder(f64),

    #[error("samples span {span:.3} decades, at least {required} required")]
    InsufficientSpan { span: f64, required: f64 },

    #[error("{found} points available, at least {required} required")]
    InsufficientPoints { found: usize, required: usize },

    #[error("fit dominated by oscillation (R^2 = {r_squared:.3})")]
    OscillationDominated { r_squared: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
