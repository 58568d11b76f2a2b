//! Numeric runtime checks of the convergence claims over a finished trajectory.
//!
//! Every check works on sampled data only. None of them calls into the
//! controllers, so a defect in a control law cannot hide itself here.
//!
//! Negative gains produce the mirror image of the positive-gain motion
//! (`θ_b → 2π − θ_b`, counterclockwise orbit). The bearing sets and the
//! Lyapunov functions below are mirrored accordingly via [`Orientation`].

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::controllers::{predicted_radius, ControllerParams, Law};
use crate::error::{Error, Result};
use crate::geometry::{RelativeGeometry, UavState};

/// Angular slack at the ends of a bearing arc.
pub const BEARING_EDGE_TOL: f64 = 1e-6;

/// One integration instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub state: UavState,
    /// Ground truth, regardless of what the controller was fed.
    pub geom: RelativeGeometry,
    pub omega: f64,
    pub r_dot_est: Option<f64>,
    pub lyap: Option<f64>,
}

/// Which way the vehicle is expected to circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `k > 0`: bearing settles at π/2.
    Clockwise,
    /// `k < 0`: bearing settles at 3π/2.
    CounterClockwise,
}

impl Orientation {
    pub fn of_gain(k: f64) -> Self {
        if k < 0.0 {
            Orientation::CounterClockwise
        } else {
            Orientation::Clockwise
        }
    }

    /// Maps a bearing into the positive-gain picture.
    pub fn canonical_bearing(self, bearing: f64) -> f64 {
        match self {
            Orientation::Clockwise => bearing,
            Orientation::CounterClockwise => (TAU - bearing).rem_euclid(TAU),
        }
    }

    pub fn steady_bearing(self) -> f64 {
        match self {
            Orientation::Clockwise => FRAC_PI_2,
            Orientation::CounterClockwise => 3.0 * FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    Clockwise,
    CounterClockwise,
    Indeterminate,
}

/// Number of maximal runs of consecutive samples with `r < r_d − tolerance`.
pub fn count_cd_episodes(samples: &[TraceSample], r_d: f64, tolerance: f64) -> usize {
    let threshold = r_d - tolerance;
    let mut inside = false;
    let mut episodes = 0;
    for s in samples {
        let now_inside = s.geom.range < threshold;
        if now_inside && !inside {
            episodes += 1;
        }
        inside = now_inside;
    }
    episodes
}

fn in_arc(bearing: f64, lo: f64, hi: f64) -> bool {
    let b = bearing.rem_euclid(TAU);
    let (lo, hi) = (lo - BEARING_EDGE_TOL, hi + BEARING_EDGE_TOL);
    (b >= lo && b <= hi) || b >= lo + TAU || b <= hi - TAU
}

/// First sample time after which the bearing stays in `[lo, hi]` (with
/// [`BEARING_EDGE_TOL`] at the ends, wrapping through 0). `None` if the last
/// sample is outside.
pub fn capture_time_in(samples: &[TraceSample], lo: f64, hi: f64) -> Option<f64> {
    let last_out = samples.iter().rposition(|s| !in_arc(s.geom.bearing, lo, hi));
    match last_out {
        None => samples.first().map(|s| s.t),
        Some(i) => samples.get(i + 1).map(|s| s.t),
    }
}

/// First time after which `θ_b ∈ [0, π]` for the rest of the trace.
pub fn bearing_capture_time(samples: &[TraceSample]) -> Option<f64> {
    capture_time_in(samples, 0.0, PI)
}

/// Capture into the invariant half-plane for the given orientation:
/// `[0, π]` clockwise, `[π, 2π]` counterclockwise.
pub fn oriented_capture_time(samples: &[TraceSample], orientation: Orientation) -> Option<f64> {
    match orientation {
        Orientation::Clockwise => capture_time_in(samples, 0.0, PI),
        Orientation::CounterClockwise => capture_time_in(samples, PI, TAU),
    }
}

/// Start of the descent window. For the smooth law this is the half-plane
/// capture. For the signum law it is the first sample after both that
/// capture and the last sample inside `r < r_d − V·dt` with the bearing at or
/// below `π/2` (at or above `3π/2` for `k < 0`).
pub fn descent_start(samples: &[TraceSample], p: &ControllerParams, dt: f64) -> Option<f64> {
    let orientation = Orientation::of_gain(p.k);
    let captured = oriented_capture_time(samples, orientation)?;
    match p.law {
        Law::Smooth => Some(captured),
        Law::Signum => {
            let inside = p.r_d - p.speed * dt;
            let outside_from = samples.iter().rposition(|s| s.geom.range < inside).map_or(0, |i| i + 1);
            samples[outside_from..]
                .iter()
                .skip_while(|s| s.t < captured)
                .find(|s| orientation.canonical_bearing(s.geom.bearing) <= FRAC_PI_2 + BEARING_EDGE_TOL)
                .map(|s| s.t)
        }
    }
}

fn smooth_potential_antiderivative(z: f64, r_d: f64, k_abs: f64) -> f64 {
    let root = (z * z - r_d * r_d).max(0.0).sqrt();
    -z.ln() + 2.0 * k_abs * (0.5 * z * root - 0.5 * r_d * r_d * (z + root).ln())
}

/// `∫_{r_a}^{r} (−1/z + 2k·sqrt(z² − r_d²)) dz` in closed form.
pub fn smooth_potential(r: f64, p: &ControllerParams) -> Result<f64> {
    if r < p.r_d {
        return Err(Error::InsideDesiredRadius { r, r_d: p.r_d });
    }
    let k_abs = p.k.abs();
    let r_a = predicted_radius(p.r_d, p.k)?;
    Ok(smooth_potential_antiderivative(r, p.r_d, k_abs) - smooth_potential_antiderivative(r_a, p.r_d, k_abs))
}

/// `1 − sin θ_b + φ(r)` for the smooth law (mirrored for `k < 0`).
///
/// Zero exactly on the orbit `r = r_a`, `θ_b = π/2`.
pub fn lyapunov_smooth(geom: &RelativeGeometry, p: &ControllerParams) -> Result<f64> {
    let bearing = Orientation::of_gain(p.k).canonical_bearing(geom.bearing);
    let phi = smooth_potential(geom.range, p)?;
    Ok(1.0 - bearing.sin() + phi)
}

/// `r − r_d` for the signum law.
pub fn lyapunov_signum(geom: &RelativeGeometry, r_d: f64) -> Result<f64> {
    if geom.range < r_d {
        return Err(Error::InsideDesiredRadius { r: geom.range, r_d });
    }
    Ok(geom.range - r_d)
}

/// The Lyapunov function that applies to `p.law`.
pub fn lyapunov(geom: &RelativeGeometry, p: &ControllerParams) -> Result<f64> {
    match p.law {
        Law::Smooth => lyapunov_smooth(geom, p),
        Law::Signum => lyapunov_signum(geom, p.r_d),
    }
}

/// Per-step increase allowed before a Lyapunov increase counts as a violation.
pub fn descent_tolerance(dt: f64) -> f64 {
    1e-6 + 1e-4 * dt
}

/// Outcome of a sampled Lyapunov descent check.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DescentCheck {
    pub violations: usize,
    /// Largest single-step increase seen in the checked window.
    pub max_rise: f64,
}

/// Counts consecutive-sample pairs where the law's Lyapunov function rises by
/// more than [`descent_tolerance`].
///
/// Only samples past [`descent_start`] with `r ≥ r_d` are considered.
pub fn check_lyapunov_descent(samples: &[TraceSample], p: &ControllerParams, dt: f64) -> usize {
    lyapunov_descent(samples, p, dt).violations
}

pub fn lyapunov_descent(samples: &[TraceSample], p: &ControllerParams, dt: f64) -> DescentCheck {
    let Some(start) = descent_start(samples, p, dt) else {
        return DescentCheck::default();
    };
    let tol = descent_tolerance(dt);
    let from = samples.partition_point(|s| s.t < start);
    let mut check = DescentCheck::default();
    let mut prev: Option<f64> = None;
    for s in &samples[from..] {
        let value = if s.geom.range < p.r_d { None } else { lyapunov(&s.geom, p).ok() };
        if let (Some(a), Some(b)) = (prev, value) {
            let rise = b - a;
            check.max_rise = check.max_rise.max(rise);
            if rise > tol {
                check.violations += 1;
            }
        }
        prev = value;
    }
    check
}

/// Net turn of the line of sight over the final `window` seconds.
///
/// The line-of-sight angle is recovered as `ψ − θ_b` so no target position is
/// needed.
pub fn rotation_direction(samples: &[TraceSample], window: f64) -> Rotation {
    let Some(last) = samples.last() else {
        return Rotation::Indeterminate;
    };
    let from = last.t - window;
    let start = samples.partition_point(|s| s.t < from);
    let los = |s: &TraceSample| s.state.heading() - s.geom.bearing;
    let net: f64 = samples[start..]
        .windows(2)
        .map(|w| {
            let d = (los(&w[1]) - los(&w[0])).rem_euclid(TAU);
            if d > PI {
                d - TAU
            } else {
                d
            }
        })
        .sum();
    if net < -PI / 4.0 {
        Rotation::Clockwise
    } else if net > PI / 4.0 {
        Rotation::CounterClockwise
    } else {
        Rotation::Indeterminate
    }
}

/// Earliest time after which the range stays within `band` of `target_radius`
/// through the end of the trace, provided at least `hold` seconds remain.
pub fn convergence_time(samples: &[TraceSample], target_radius: f64, band: f64, hold: f64) -> Option<f64> {
    let last = samples.last()?;
    let last_out = samples
        .iter()
        .rposition(|s| (s.geom.range - target_radius).abs() > band);
    let t = match last_out {
        None => samples[0].t,
        Some(i) => samples.get(i + 1)?.t,
    };
    (last.t - t >= hold).then_some(t)
}

/// Samples violating the no-reentry property: once `r ≥ r_d` with the bearing
/// strictly between `asin(r_d/r)` and `2π − asin(r_d/r)`, the range never
/// drops below `r_d − eps`.
pub fn no_reentry_violations(samples: &[TraceSample], r_d: f64, eps: f64) -> usize {
    let armed = samples.iter().position(|s| {
        let r = s.geom.range;
        if r < r_d {
            return false;
        }
        let edge = (r_d / r).asin();
        s.geom.bearing > edge && s.geom.bearing < TAU - edge
    });
    match armed {
        None => 0,
        Some(i) => samples[i..].iter().filter(|s| s.geom.range < r_d - eps).count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Range statistics over the final `window` seconds.
pub fn steady_radius(samples: &[TraceSample], window: f64) -> Option<WindowStats> {
    let last = samples.last()?;
    let start = samples.partition_point(|s| s.t < last.t - window);
    let tail = &samples[start..];
    let n = tail.len() as f64;
    let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for s in tail {
        sum += s.geom.range;
        min = min.min(s.geom.range);
        max = max.max(s.geom.range);
    }
    Some(WindowStats { mean: sum / n, min, max })
}

/// Largest `|θ_b − expected|` over the final `window` seconds, wrap-aware.
pub fn max_bearing_deviation(samples: &[TraceSample], window: f64, expected: f64) -> Option<f64> {
    let last = samples.last()?;
    let start = samples.partition_point(|s| s.t < last.t - window);
    samples[start..]
        .iter()
        .map(|s| {
            let d = (s.geom.bearing - expected).rem_euclid(TAU);
            d.min(TAU - d)
        })
        .reduce(f64::max)
}

/// Thresholds and windows used to turn a trace into a [`RunReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSettings {
    /// Gain and the radius the controller actually uses.
    pub params: ControllerParams,
    pub gain_valid: bool,
    /// The controller saw the true range rate, so the Lyapunov descent claim applies.
    pub exact_range_rate: bool,
    pub dt: f64,
    /// Radius the orbit should settle on.
    pub expected_radius: f64,
    pub radius_band: f64,
    pub bearing_band: f64,
    pub steady_window: f64,
    pub rotation_window: f64,
    pub convergence_hold: f64,
    /// Crossings of `r_d` shallower than this are sampling artifacts.
    pub boundary_tolerance: f64,
}

/// Verdict keys; stable strings because they appear in `report.json`.
pub mod verdict {
    pub const NO_REENTRY: &str = "no_reentry_after_tangent_heading";
    pub const SINGLE_CD_ENTRY: &str = "single_cd_entry";
    pub const BEARING_CAPTURE: &str = "bearing_capture";
    pub const LYAPUNOV_DESCENT: &str = "lyapunov_descent";
    pub const ROTATION: &str = "rotation_direction";
    pub const STEADY_RADIUS: &str = "steady_radius";
    pub const STEADY_BEARING: &str = "steady_bearing";
    pub const SATURATION: &str = "saturation";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub final_radius: f64,
    pub steady_radius_mean: f64,
    pub steady_radius_min: f64,
    pub steady_radius_max: f64,
    pub steady_bearing_max_deviation: f64,
    pub convergence_time: Option<f64>,
    pub bearing_capture_time: Option<f64>,
    pub cd_entry_episodes: usize,
    pub rotation: Rotation,
    pub lyapunov_violations: usize,
    pub lyapunov_max_rise: f64,
    pub max_abs_omega: f64,
    pub theorem_verdicts: BTreeMap<String, bool>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.theorem_verdicts.values().all(|&v| v)
    }
}

/// Runs every monitor over a trace. Returns `None` for an empty trace.
pub fn evaluate(samples: &[TraceSample], m: &MonitorSettings) -> Option<RunReport> {
    let last = samples.last()?;
    let p = &m.params;
    let orientation = Orientation::of_gain(p.k);

    let steady = steady_radius(samples, m.steady_window)?;
    let bearing_dev = max_bearing_deviation(samples, m.steady_window, orientation.steady_bearing())?;
    let capture = oriented_capture_time(samples, orientation);
    let cd_entry_episodes = count_cd_episodes(samples, p.r_d, m.boundary_tolerance);
    let rotation = rotation_direction(samples, m.rotation_window);
    let descent = lyapunov_descent(samples, p, m.dt);
    let max_abs_omega = samples.iter().map(|s| s.omega.abs()).fold(0.0, f64::max);
    let reentries = no_reentry_violations(samples, p.r_d, m.boundary_tolerance);

    let mut verdicts = BTreeMap::new();
    verdicts.insert(verdict::NO_REENTRY.to_owned(), reentries == 0);
    verdicts.insert(verdict::SINGLE_CD_ENTRY.to_owned(), cd_entry_episodes <= 1);
    if p.law == Law::Signum {
        verdicts.insert(verdict::SATURATION.to_owned(), max_abs_omega <= p.k.abs());
    }
    if m.gain_valid {
        let expected_rotation = match orientation {
            Orientation::Clockwise => Rotation::Clockwise,
            Orientation::CounterClockwise => Rotation::CounterClockwise,
        };
        verdicts.insert(verdict::BEARING_CAPTURE.to_owned(), capture.is_some());
        if m.exact_range_rate {
            verdicts.insert(verdict::LYAPUNOV_DESCENT.to_owned(), descent.violations == 0);
        }
        verdicts.insert(verdict::ROTATION.to_owned(), rotation == expected_rotation);
        verdicts.insert(
            verdict::STEADY_RADIUS.to_owned(),
            (steady.mean - m.expected_radius).abs() <= m.radius_band,
        );
        verdicts.insert(verdict::STEADY_BEARING.to_owned(), bearing_dev <= m.bearing_band);
    }

    Some(RunReport {
        final_radius: last.geom.range,
        steady_radius_mean: steady.mean,
        steady_radius_min: steady.min,
        steady_radius_max: steady.max,
        steady_bearing_max_deviation: bearing_dev,
        convergence_time: convergence_time(samples, m.expected_radius, m.radius_band, m.convergence_hold),
        bearing_capture_time: capture,
        cd_entry_episodes,
        rotation,
        lyapunov_violations: descent.violations,
        lyapunov_max_rise: descent.max_rise,
        max_abs_omega,
        theorem_verdicts: verdicts,
    })
}
