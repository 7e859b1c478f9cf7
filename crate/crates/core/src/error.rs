use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("order {0} outside supported range [-0.5, 60]")]
    OrderOutOfRange(f64),

    #[error("{op}: result is not representable (overflow) at order {nu}, x = {x}")]
    Overflow { op: &'static str, nu: f64, x: f64 },

    #[error("{op}: iteration did not converge")]
    NoConvergence { op: &'static str },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("integrand is not finite at node x = {x} (value {value})")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("semi-infinite integral diverged or exceeded the panel budget ({panels} panels)")]
    Divergence { panels: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("calibration failed for n = {n}: round-trip discrepancy {discrepancy:.3e} exceeds {tolerance:.1e}")]
    Calibration {
        n: f64,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("linear system is singular or ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("not enough samples: {samples} samples for {unknowns} unknowns")]
    InsufficientSamples { samples: usize, unknowns: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}
