use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("vehicle coincides with the target (range {range:e} m)")]
    ZeroRange { range: f64 },

    #[error("vehicle reached the target at t = {t} s (range {range:e} m)")]
    Singularity { t: f64, range: f64 },

    #[error("range {r} m is inside the desired radius {r_d} m")]
    InsideDesiredRadius { r: f64, r_d: f64 },

    #[error("gain k = {k} must be nonzero")]
    ZeroGain { k: f64 },

    #[error("gain |k| = {k_abs} does not exceed 1/(2 r_d^2) = {bound}; radius compensation is undefined")]
    InvalidCompensationGain { k_abs: f64, bound: f64 },

    #[error("filter time constant must be positive, got {0}")]
    NonPositiveTimeConstant(f64),

    #[error("filter step dt = {dt} s is not below tau = {tau} s; explicit update is unstable")]
    UnstableDiscretization { dt: f64, tau: f64 },

    #[error("filter used before initialization")]
    FilterUninitialized,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}
