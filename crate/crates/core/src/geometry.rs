//! Target-relative geometry: range, range rate and bearing angle.
//!
//! The bearing angle is measured counterclockwise from the line of sight
//! (vehicle to target) to the vehicle heading and lives in `[0, 2π)`. With
//! this convention the range rate of a static target is `ṙ = −V cos θ_b` and
//! the bearing evolves as `θ̇_b = ω + V sin θ_b / r`.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Planar point or displacement, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Direction angle `atan2(y, x)` in `(−π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Planar pose of the vehicle. The heading is kept wrapped to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub position: Vec2,
    heading: f64,
}

impl UavState {
    pub fn new(x: f64, y: f64, heading: f64) -> Result<Self> {
        ensure_finite(x, "x")?;
        ensure_finite(y, "y")?;
        Ok(Self {
            position: Vec2::new(x, y),
            heading: wrap_angle(heading)?,
        })
    }

    /// Heading ψ in `[0, 2π)`.
    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub(crate) fn from_parts_unchecked(position: Vec2, heading: f64) -> Self {
        Self { position, heading }
    }
}

/// What the vehicle would see of the target if it had perfect sensors.
///
/// Controllers only ever receive `range` and `range_rate` (see
/// [`crate::controllers::RangeObservation`]); the bearing is for monitors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGeometry {
    pub range: f64,
    pub range_rate: f64,
    pub bearing: f64,
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> Result<f64> {
    ensure_finite(a, "angle")?;
    let w = a.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    Ok(if w >= TAU { 0.0 } else { w })
}

/// Range, range rate and bearing of `target` as seen from `state` moving at speed `speed`.
pub fn relative_geometry(state: &UavState, target: Vec2, speed: f64) -> Result<RelativeGeometry> {
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::Config(format!("speed must be positive and finite, got {speed}")));
    }
    let los = target - state.position;
    let range = los.norm();
    if !range.is_finite() {
        return Err(Error::NonFinite("range"));
    }
    if range <= 0.0 {
        return Err(Error::ZeroRange { range });
    }
    let bearing = wrap_angle(state.heading - los.angle())?;
    Ok(RelativeGeometry {
        range,
        range_rate: -speed * bearing.cos(),
        bearing,
    })
}

/// Cosine of the heading that points at the tangency point of the circle of
/// radius `r_d`, relative to the line of sight: `cos(π − asin(r_d/r))`.
///
/// Evaluated as `−sqrt(1 − (r_d/r)²)`, which is exactly zero at `r = r_d`.
pub fn tangent_cos(r: f64, r_d: f64) -> Result<f64> {
    ensure_finite(r, "range")?;
    ensure_finite(r_d, "desired radius")?;
    if r_d <= 0.0 {
        return Err(Error::Config(format!("desired radius must be positive, got {r_d}")));
    }
    if r < r_d {
        return Err(Error::InsideDesiredRadius { r, r_d });
    }
    let ratio = r_d / r;
    Ok(-(1.0 - ratio * ratio).max(0.0).sqrt())
}
