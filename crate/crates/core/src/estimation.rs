//! Range-rate estimation from range samples.
//!
//! A dirty derivative `s/(τs + 1)` discretized with explicit Euler. The lag
//! state starts at the first range sample so the first estimate is zero.

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateFilterState {
    y_hat: f64,
    tau: f64,
    initialized: bool,
}

impl RateFilterState {
    pub fn init(r0: f64, tau: f64) -> Result<Self> {
        ensure_finite(r0, "initial range")?;
        ensure_finite(tau, "time constant")?;
        if tau <= 0.0 {
            return Err(Error::NonPositiveTimeConstant(tau));
        }
        if r0 <= 0.0 {
            return Err(Error::Config(format!("initial range must be positive, got {r0}")));
        }
        Ok(Self {
            y_hat: r0,
            tau,
            initialized: true,
        })
    }

    /// Feeds one range sample. Returns the advanced state and the range-rate
    /// estimate for this sample.
    pub fn step(self, r: f64, dt: f64) -> Result<(Self, f64)> {
        if !self.initialized {
            return Err(Error::FilterUninitialized);
        }
        ensure_finite(r, "range")?;
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::Config(format!("filter step must be positive, got {dt}")));
        }
        if dt >= self.tau {
            return Err(Error::UnstableDiscretization { dt, tau: self.tau });
        }
        let estimate = (r - self.y_hat) / self.tau;
        let next = Self {
            y_hat: self.y_hat + dt * estimate,
            ..self
        };
        Ok((next, estimate))
    }

    pub fn y_hat(&self) -> f64 {
        self.y_hat
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }
}
