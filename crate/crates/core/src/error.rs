use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("rule `{rule}` has offset ({dx}, {dy}) outside a {width}x{height} lattice with fixed boundaries")]
    NeighborhoodTooLarge {
        rule: String,
        dx: i32,
        dy: i32,
        width: usize,
        height: usize,
    },

    #[error("invalid rule: {0}")]
    Rule(String),

    #[error("invalid noise model: {0}")]
    Noise(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("non-finite oscillator position {0}")]
    NonFinite(f64),

    #[error("integration diverged at t = {time}: |{what}| = {value:e} exceeds guard {guard:e}")]
    Divergence {
        time: f64,
        what: &'static str,
        value: f64,
        guard: f64,
    },

    #[error("invalid trajectory: {0}")]
    Trajectory(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("fit did not converge (weighted residual {residual:e}): {reason}")]
    FitFailed { residual: f64, reason: String },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
