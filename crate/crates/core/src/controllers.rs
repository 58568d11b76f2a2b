//! Range-only turn-rate laws and their equilibrium analysis.
//!
//! Both laws compare the measured range rate with the range rate the vehicle
//! would have if it were heading for the tangency point of the circle of
//! radius `r_d`. Inside that circle they command zero turn rate.
//!
//! Controllers see a [`RangeObservation`] and nothing else: no position, no
//! heading, no bearing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::tangent_cos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// `ω = k·[2rV·cos(π − asin(r_d/r)) − 2r·ṙ]`, unsaturated; converges to the radius of [`predicted_radius`].
    Smooth,
    /// `ω = k·sign(V·cos(π − asin(r_d/r)) − ṙ)`, saturated at `|k|`; converges to `r_d`.
    #[serde(alias = "sign")]
    Signum,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Smooth => "smooth",
            Law::Signum => "signum",
        })
    }
}

/// Gain and geometry of a control law.
///
/// The unit of `k` depends on the law: 1/(m²·s) for [`Law::Smooth`], rad/s
/// for [`Law::Signum`]. Negative gains are allowed and reverse the orbit
/// direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub k: f64,
    pub r_d: f64,
    pub speed: f64,
    pub law: Law,
}

impl ControllerParams {
    pub fn new(k: f64, r_d: f64, speed: f64, law: Law) -> Result<Self> {
        ensure_finite(k, "gain")?;
        ensure_finite(r_d, "desired radius")?;
        ensure_finite(speed, "speed")?;
        if k == 0.0 {
            return Err(Error::ZeroGain { k });
        }
        if r_d <= 0.0 {
            return Err(Error::Config(format!("desired radius must be positive, got {r_d}")));
        }
        if speed <= 0.0 {
            return Err(Error::Config(format!("speed must be positive, got {speed}")));
        }
        Ok(Self { k, r_d, speed, law })
    }

    /// Sufficient lower bound on `|k|` for convergence: `1/(2 r_d²)` for the
    /// smooth law, `V/r_d` for the signum law.
    pub fn gain_bound(&self) -> f64 {
        match self.law {
            Law::Smooth => 1.0 / (2.0 * self.r_d * self.r_d),
            Law::Signum => self.speed / self.r_d,
        }
    }
}

/// The only vehicle information a controller receives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeObservation {
    pub r: f64,
    pub r_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainValidity {
    Valid,
    BelowTheoremBound,
}

pub fn smooth_omega(obs: RangeObservation, p: &ControllerParams) -> f64 {
    match tangent_cos(obs.r, p.r_d) {
        Ok(tc) => p.k * (2.0 * obs.r * p.speed * tc - 2.0 * obs.r * obs.r_dot),
        Err(_) => 0.0,
    }
}

pub fn signum_omega(obs: RangeObservation, p: &ControllerParams) -> f64 {
    match tangent_cos(obs.r, p.r_d) {
        Ok(tc) => p.k * sign(p.speed * tc - obs.r_dot),
        Err(_) => 0.0,
    }
}

/// Dispatches on `p.law`.
pub fn omega(obs: RangeObservation, p: &ControllerParams) -> f64 {
    match p.law {
        Law::Smooth => smooth_omega(obs, p),
        Law::Signum => signum_omega(obs, p),
    }
}

/// Signum with `sign(0) = 0`.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Orbit radius of the smooth law: `sqrt((r_d² + sqrt(r_d⁴ + 1/k²)) / 2)`.
pub fn predicted_radius(r_d: f64, k: f64) -> Result<f64> {
    ensure_finite(r_d, "desired radius")?;
    ensure_finite(k, "gain")?;
    if k == 0.0 {
        return Err(Error::ZeroGain { k });
    }
    if r_d <= 0.0 {
        return Err(Error::Config(format!("desired radius must be positive, got {r_d}")));
    }
    let r_d2 = r_d * r_d;
    let inv_k = 1.0 / k;
    Ok((0.5 * (r_d2 + r_d2.hypot(inv_k))).sqrt())
}

/// Commanded radius for which the smooth law settles on a circle of radius `r_d`:
/// `r_d·sqrt(1 − 1/(4k²r_d⁴))`.
pub fn compensated_rd(r_d: f64, k: f64) -> Result<f64> {
    ensure_finite(r_d, "desired radius")?;
    ensure_finite(k, "gain")?;
    if r_d <= 0.0 {
        return Err(Error::Config(format!("desired radius must be positive, got {r_d}")));
    }
    let bound = 1.0 / (2.0 * r_d * r_d);
    if k.abs() <= bound {
        return Err(Error::InvalidCompensationGain { k_abs: k.abs(), bound });
    }
    let q = 1.0 / (2.0 * k * r_d * r_d);
    Ok(r_d * (1.0 - q * q).sqrt())
}

pub fn validate_gain(p: &ControllerParams) -> GainValidity {
    if p.k.abs() > p.gain_bound() {
        GainValidity::Valid
    } else {
        GainValidity::BelowTheoremBound
    }
}
