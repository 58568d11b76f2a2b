//! Fixed-step integration of the constant-speed unicycle.
//!
//! ```text
//! ẋ = V cos ψ,  ẏ = V sin ψ,  ψ̇ = ω
//! ```
//!
//! The turn-rate command is held constant over each step.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{wrap_angle, UavState, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSettings {
    pub dt: f64,
    pub scheme: Scheme,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            scheme: Scheme::Rk4,
        }
    }
}

impl IntegrationSettings {
    pub fn new(dt: f64, scheme: Scheme) -> Result<Self> {
        let settings = Self { dt, scheme };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive and finite, got {}", self.dt)));
        }
        Ok(())
    }

    /// Logs a warning and returns `false` when `dt` exceeds `0.1 · r_d / V`.
    pub fn check_resolution(&self, r_d: f64, speed: f64) -> bool {
        let bound = 0.1 * r_d / speed;
        if self.dt > bound {
            warn!("dt = {} s exceeds the recommended bound 0.1·r_d/V = {} s", self.dt, bound);
            false
        } else {
            true
        }
    }
}

/// Time derivative of the pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRate {
    pub x_dot: f64,
    pub y_dot: f64,
    pub heading_dot: f64,
}

pub fn derivative(state: &UavState, speed: f64, omega: f64) -> Result<StateRate> {
    ensure_finite(speed, "speed")?;
    ensure_finite(omega, "turn rate")?;
    Ok(rate_at(state.heading(), speed, omega))
}

#[inline]
fn rate_at(heading: f64, speed: f64, omega: f64) -> StateRate {
    let (s, c) = heading.sin_cos();
    StateRate {
        x_dot: speed * c,
        y_dot: speed * s,
        heading_dot: omega,
    }
}

/// Advances the pose by one step of `settings.dt` with `omega` held constant.
pub fn step(state: &UavState, speed: f64, omega: f64, settings: &IntegrationSettings) -> UavState {
    let dt = settings.dt;
    let p = state.position;
    let psi = state.heading();

    let (delta, dpsi) = match settings.scheme {
        Scheme::Euler => {
            let k1 = rate_at(psi, speed, omega);
            (Vec2::new(k1.x_dot, k1.y_dot) * dt, k1.heading_dot * dt)
        }
        Scheme::Rk4 => {
            // position does not feed back into the rates, only the heading does
            let k1 = rate_at(psi, speed, omega);
            let k2 = rate_at(psi + 0.5 * dt * k1.heading_dot, speed, omega);
            let k3 = rate_at(psi + 0.5 * dt * k2.heading_dot, speed, omega);
            let k4 = rate_at(psi + dt * k3.heading_dot, speed, omega);
            let sixth = dt / 6.0;
            (
                Vec2::new(
                    sixth * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot),
                    sixth * (k1.y_dot + 2.0 * k2.y_dot + 2.0 * k3.y_dot + k4.y_dot),
                ),
                sixth * (k1.heading_dot + 2.0 * k2.heading_dot + 2.0 * k3.heading_dot + k4.heading_dot),
            )
        }
    };

    let heading = wrap_angle(psi + dpsi).unwrap_or(psi);
    UavState::from_parts_unchecked(p + delta, heading)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2, TAU};

    /// Exact pose after time `t` on the arc of radius V/ω.
    fn exact_arc(s: &UavState, v: f64, w: f64, t: f64) -> (f64, f64) {
        let psi = s.heading();
        let rad = v / w;
        (
            s.position.x + rad * ((psi + w * t).sin() - psi.sin()),
            s.position.y - rad * ((psi + w * t).cos() - psi.cos()),
        )
    }

    fn rk4(dt: f64) -> IntegrationSettings {
        IntegrationSettings::new(dt, Scheme::Rk4).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let d = derivative(&UavState::new(0.0, 0.0, 0.0).unwrap(), 1.0, 0.0).unwrap();
        assert_eq!((d.x_dot, d.y_dot, d.heading_dot), (1.0, 0.0, 0.0));

        let d = derivative(&UavState::new(0.0, 0.0, FRAC_PI_2).unwrap(), 1.0, 0.5).unwrap();
        assert!(d.x_dot.abs() < 1e-15);
        assert_relative_eq!(d.y_dot, 1.0);
        assert_eq!(d.heading_dot, 0.5);

        let d = derivative(&UavState::new(0.0, 0.0, FRAC_PI_4).unwrap(), 2.0, -1.0).unwrap();
        assert_relative_eq!(d.x_dot, SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(d.y_dot, SQRT_2, epsilon = 1e-15);
        assert_eq!(d.heading_dot, -1.0);

        assert!(derivative(&UavState::new(0.0, 0.0, 0.0).unwrap(), 1.0, f64::NAN).is_err());
    }

    #[test]
    fn straight_line_step_is_exact() {
        let s = UavState::new(0.0, 0.0, 0.0).unwrap();
        let n = step(&s, 1.0, 0.0, &rk4(0.01));
        assert_relative_eq!(n.position.x, 0.01, epsilon = 1e-16);
        assert_eq!(n.position.y, 0.0);
        assert_eq!(n.heading(), 0.0);

        let e = step(&s, 1.0, 0.0, &IntegrationSettings::new(0.01, Scheme::Euler).unwrap());
        assert_eq!(e, n);
    }

    #[test]
    fn single_step_matches_arc_to_fifth_order() {
        for &psi in &[0.0, 0.7, 2.0, 4.5] {
            let s = UavState::new(1.0, -2.0, psi).unwrap();
            let dt = 0.01;
            let n = step(&s, 1.0, 0.1, &rk4(dt));
            let (ex, ey) = exact_arc(&s, 1.0, 0.1, dt);
            let err = (n.position.x - ex).hypot(n.position.y - ey);
            // local error of Simpson quadrature on cos/sin: (dt^5/2880)·V·ω⁴
            assert!(err < 1e-14, "psi={psi} err={err:e}");
            assert_relative_eq!(n.heading(), wrap_angle(psi + 0.1 * dt).unwrap(), epsilon = 1e-15);
        }
    }

    #[test]
    fn endpoint_error_order_on_circle() {
        // Large turn rate so truncation error dominates roundoff.
        let (v, w, horizon): (f64, f64, f64) = (1.0, 2.0, 10.0);
        let s = UavState::new(0.0, 0.0, 0.3).unwrap();
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dt| {
                let n = (horizon / dt).round() as usize;
                let mut st = s;
                for _ in 0..n {
                    st = step(&st, v, w, &rk4(dt));
                }
                let (ex, ey) = exact_arc(&s, v, w, horizon);
                (st.position.x - ex).hypot(st.position.y - ey)
            })
            .collect();
        assert!(errs[0] / errs[1] >= 8.0, "{errs:?}");
        assert!(errs[1] / errs[2] >= 8.0, "{errs:?}");
    }

    #[test]
    fn invalid_settings_rejected() {
        assert!(IntegrationSettings::new(0.0, Scheme::Rk4).is_err());
        assert!(IntegrationSettings::new(-1.0, Scheme::Rk4).is_err());
        assert!(IntegrationSettings::new(f64::NAN, Scheme::Rk4).is_err());
        assert!(rk4(0.01).check_resolution(10.0, 1.0));
        assert!(!rk4(2.0).check_resolution(10.0, 1.0));
    }

    proptest! {
        #[test]
        fn displacement_never_exceeds_speed_times_dt(
            x in -100.0f64..100.0, y in -100.0f64..100.0, psi in 0.0f64..TAU,
            v in 0.1f64..10.0, w in -3.0f64..3.0, dt in 1e-4f64..0.1,
        ) {
            let s = UavState::new(x, y, psi).unwrap();
            let n = step(&s, v, w, &rk4(dt));
            let d = (n.position - s.position).norm();
            prop_assert!(d <= v * dt * (1.0 + 1e-12));
            let n0 = step(&s, v, 0.0, &rk4(dt));
            prop_assert!(((n0.position - s.position).norm() - v * dt).abs() < 1e-9);
            prop_assert!((0.0..TAU).contains(&n.heading()));
        }

        #[test]
        fn stepping_is_deterministic(psi in 0.0f64..TAU, w in -1.0f64..1.0) {
            let s = UavState::new(3.0, 4.0, psi).unwrap();
            let a = step(&s, 1.0, w, &rk4(0.01));
            let b = step(&s, 1.0, w, &rk4(0.01));
            prop_assert_eq!(a.position.x.to_bits(), b.position.x.to_bits());
            prop_assert_eq!(a.position.y.to_bits(), b.position.y.to_bits());
            prop_assert_eq!(a.heading().to_bits(), b.heading().to_bits());
        }
    }
}
