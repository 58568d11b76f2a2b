//! Single-run simulation loop and initial-state sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{InitSpec, RdotSource, ResolvedScenario};
use crate::controllers::{self, RangeObservation};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::estimation::RateFilterState;
use crate::geometry::{relative_geometry, UavState};
use crate::monitors::{self, Orientation, TraceSample};

/// Below this range the bearing is meaningless and the run is aborted.
pub const SINGULAR_RANGE: f64 = 1e-9;

/// Samples of one run, spaced exactly `dt` apart from `t = 0`.
#[derive(Debug, Clone)]
pub struct SimTrace {
    pub initial: UavState,
    pub samples: Vec<TraceSample>,
}

/// Random stream for run `run_index` of a batch seeded with `seed`.
///
/// Streams are independent ChaCha8 streams keyed by run index, so changing
/// the run count never perturbs earlier runs.
pub fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// Draws an initial pose from the configured box (or returns the explicit
/// pose).
pub fn sample_initial_state<R: Rng + ?Sized>(init: &InitSpec, rng: &mut R) -> Result<UavState> {
    match *init {
        InitSpec::Explicit { x, y, psi } => UavState::new(x, y, psi),
        InitSpec::SampledBox {
            x_range,
            y_range,
            psi_range,
            allow_degenerate,
        } => {
            let flat = x_range[0] == x_range[1] || y_range[0] == y_range[1];
            if flat && !allow_degenerate {
                return Err(Error::Config("sampling box has zero width".into()));
            }
            let mut uniform = |[lo, hi]: [f64; 2]| -> Result<f64> {
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(Error::Config(format!("empty sampling range [{lo}, {hi}]")));
                }
                // draw unconditionally so every coordinate consumes the same amount of the stream
                let u: f64 = rng.random();
                Ok(lo + (hi - lo) * u)
            };
            let x = uniform(x_range)?;
            let y = uniform(y_range)?;
            let psi = uniform(psi_range)?;
            UavState::new(x, y, psi)
        }
    }
}

/// Initial pose of run `run_index`.
pub fn initial_state_for_run(scenario: &ResolvedScenario, run_index: u64) -> Result<UavState> {
    let mut rng = run_rng(scenario.config.seed, run_index);
    sample_initial_state(&scenario.config.init, &mut rng)
}

/// Integrates one run from `initial` over `[0, duration]`.
///
/// Per step: ground-truth geometry, range observation (true or filtered
/// range rate), turn-rate command, one integrator step.
pub fn run_simulation(scenario: &ResolvedScenario, initial: UavState) -> Result<SimTrace> {
    let cfg = &scenario.config;
    let params = scenario.params;
    let target = cfg.target_point();
    let integration = cfg.integration();
    let dt = cfg.dt;
    let orientation = Orientation::of_gain(params.k);

    let mut samples = Vec::with_capacity(scenario.steps + 1);
    let mut state = initial;
    let mut filter: Option<RateFilterState> = None;

    for i in 0..=scenario.steps {
        let t = i as f64 * dt;
        let range = (target - state.position).norm();
        if range.is_nan() || range < SINGULAR_RANGE {
            return Err(Error::Singularity { t, range });
        }
        let geom = relative_geometry(&state, target, cfg.v)?;

        let r_dot_est = match cfg.rdot_source {
            RdotSource::GroundTruth => None,
            RdotSource::Filtered { tau } => {
                let f = match filter {
                    Some(f) => f,
                    None => RateFilterState::init(geom.range, tau)?,
                };
                let (next, est) = f.step(geom.range, dt)?;
                filter = Some(next);
                Some(est)
            }
        };
        let obs = RangeObservation {
            r: geom.range,
            r_dot: r_dot_est.unwrap_or(geom.range_rate),
        };
        let omega = controllers::omega(obs, &params);

        let lyap = if geom.range >= params.r_d && lyapunov_domain(orientation, params.law, geom.bearing) {
            monitors::lyapunov(&geom, &params).ok()
        } else {
            None
        };

        samples.push(TraceSample {
            t,
            state,
            geom,
            omega,
            r_dot_est,
            lyap,
        });

        if i < scenario.steps {
            state = dynamics::step(&state, cfg.v, omega, &integration);
        }
    }

    Ok(SimTrace { initial, samples })
}

fn lyapunov_domain(orientation: Orientation, law: controllers::Law, bearing: f64) -> bool {
    match law {
        controllers::Law::Signum => true,
        controllers::Law::Smooth => {
            let b = orientation.canonical_bearing(bearing);
            b <= std::f64::consts::PI + monitors::BEARING_EDGE_TOL || b >= std::f64::consts::TAU - monitors::BEARING_EDGE_TOL
        }
    }
}
