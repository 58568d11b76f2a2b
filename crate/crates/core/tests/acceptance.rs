//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circumnav_core::controllers::{compensated_rd, predicted_radius};
use circumnav_core::dynamics::{step, IntegrationSettings, Scheme};
use circumnav_core::harness::{run_batch, BatchOptions, BatchReport, RdotSource};
use circumnav_core::monitors::lyapunov_smooth;
use circumnav_core::{ControllerParams, Law, RelativeGeometry, Rotation, RunReport, ScenarioConfig, UavState};

const SEED: u64 = 1;
const RUNS: usize = 20;

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line {
        pass,
        detail: detail.into(),
    }
}

fn batch(cfg: ScenarioConfig) -> BatchReport {
    let scenario = cfg.resolve().expect("scenario resolves");
    run_batch(&scenario, &BatchOptions::default()).expect("batch runs")
}

fn reference(runs: usize) -> ScenarioConfig {
    ScenarioConfig {
        seed: SEED,
        runs,
        ..ScenarioConfig::default()
    }
}

fn signum(runs: usize) -> ScenarioConfig {
    ScenarioConfig {
        seed: SEED,
        runs,
        ..ScenarioConfig::signum_reference()
    }
}

/// Completed run reports, or `None` if any run aborted.
fn reports(b: &BatchReport) -> Option<Vec<&RunReport>> {
    b.runs.iter().map(|r| r.report()).collect()
}

fn radius_band(b: &BatchReport, center: f64, band: f64) -> Line {
    let Some(rs) = reports(b) else {
        return line(false, format!("{} of {} runs aborted", b.summary.failed, b.summary.runs));
    };
    let (lo, hi) = rs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.steady_radius_mean), hi.max(r.steady_radius_mean))
    });
    let pass = rs.iter().all(|r| (r.steady_radius_mean - center).abs() <= band);
    line(
        pass,
        format!("{} runs, steady radius mean in [{lo:.5}, {hi:.5}], required {center} ± {band}", rs.len()),
    )
}

/// Gain-bound multiples of the grid; the first is just above the bound.
fn valid_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for i in 0..10 {
        let r_d = 1.0 + 99.0 * i as f64 / 9.0;
        let bound = 1.0 / (2.0 * r_d * r_d);
        for j in 0..10 {
            let mult = 1.01 * (1000.0f64 / 1.01).powf(j as f64 / 9.0);
            grid.push((r_d, bound * mult));
        }
    }
    grid
}

fn random_scenarios(n: usize) -> Vec<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..n)
        .map(|i| {
            let r_d: f64 = rng.random_range(5.0..20.0);
            let (law, k, compensate) = if i % 2 == 0 {
                let mult: f64 = rng.random_range(1.5..20.0);
                (Law::Smooth, mult / (2.0 * r_d * r_d), rng.random_bool(0.5))
            } else {
                let mult: f64 = rng.random_range(1.2..3.0);
                (Law::Signum, mult / r_d, false)
            };
            ScenarioConfig {
                r_d,
                k,
                law,
                compensate_rd: compensate,
                seed: 100 + i as u64,
                runs: 1,
                ..ScenarioConfig::default()
            }
        })
        .collect()
}

fn circle_endpoint_errors(dts: &[f64]) -> Vec<f64> {
    let (v, w, horizon, psi0) = (1.0, 2.0, 10.0, 0.3);
    let (ex, ey) = common::arc_endpoint(0.0, 0.0, psi0, v, w, horizon);
    dts.iter()
        .map(|&dt| {
            let settings = IntegrationSettings::new(dt, Scheme::Rk4).unwrap();
            let mut s = UavState::new(0.0, 0.0, psi0).unwrap();
            for _ in 0..(horizon / dt).round() as usize {
                s = step(&s, v, w, &settings);
            }
            (s.position.x - ex).hypot(s.position.y - ey)
        })
        .collect()
}

fn join(xs: &[f64], f: impl Fn(f64) -> String) -> String {
    xs.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ")
}

fn report_bytes(dir: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(["--seed", &SEED.to_string(), "--runs", &RUNS.to_string(), "--no-traces", "--out-dir"])
        .arg(dir)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("simulate runs");
    assert!(status.code().is_some(), "simulate killed");
    std::fs::read(dir.join("report.json")).expect("report.json written")
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut lines: Vec<(u32, &str, Line)> = Vec::new();

    let b1 = batch(reference(RUNS));
    lines.push((1, "smooth-law equilibrium radius", radius_band(&b1, 10.9868, 0.05)));

    let grid = valid_grid();
    let worst_fixed_point = grid
        .iter()
        .map(|&(r_d, k)| {
            let closed = predicted_radius(r_d, k).unwrap();
            let oracle = common::equilibrium_radius_bisection(r_d, k);
            ((closed - oracle) / oracle).abs()
        })
        .fold(0.0, f64::max);
    lines.push((
        2,
        "closed-form radius vs fixed point",
        line(
            worst_fixed_point <= 1e-8,
            format!("{} grid points, worst relative error {worst_fixed_point:.3e} (limit 1e-8)", grid.len()),
        ),
    ));

    let b3 = batch(ScenarioConfig {
        compensate_rd: true,
        ..reference(RUNS)
    });
    let worst_round_trip = grid
        .iter()
        .map(|&(r_d, k)| (predicted_radius(compensated_rd(r_d, k).unwrap(), k).unwrap() - r_d).abs())
        .fold(0.0, f64::max);
    let band3 = radius_band(&b3, 10.0, 0.05);
    lines.push((
        3,
        "radius compensation",
        line(
            band3.pass && worst_round_trip <= 1e-10,
            format!("{}; round-trip worst error {worst_round_trip:.3e} (limit 1e-10)", band3.detail),
        ),
    ));

    let b4 = batch(signum(RUNS));
    let band4 = radius_band(&b4, 10.0, 0.10);
    let max_omega = reports(&b4)
        .map(|rs| rs.iter().map(|r| r.max_abs_omega).fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    lines.push((
        4,
        "signum-law radius and saturation",
        line(
            band4.pass && max_omega <= 0.12,
            format!("{}; max |omega| {max_omega} (limit 0.12)", band4.detail),
        ),
    ));

    let randomized: Vec<BatchReport> = random_scenarios(50).into_iter().map(batch).collect();
    let mut property_runs: Vec<(&str, &BatchReport)> = vec![("smooth", &b1), ("compensated", &b3), ("signum", &b4)];
    property_runs.extend(randomized.iter().map(|b| ("randomized", b)));
    let aborted: usize = property_runs.iter().map(|(_, b)| b.summary.failed).sum();
    let all_reports: Vec<&RunReport> = property_runs.iter().filter_map(|(_, b)| reports(b)).flatten().collect();

    let max_episodes = all_reports.iter().map(|r| r.cd_entry_episodes).max().unwrap_or(0);
    lines.push((
        5,
        "at most one entry into the desired disk",
        line(
            aborted == 0 && max_episodes <= 1,
            format!(
                "{} runs ({} aborted), max entry episodes {max_episodes}",
                all_reports.len(),
                aborted
            ),
        ),
    ));

    let uncaptured = all_reports.iter().filter(|r| r.bearing_capture_time.is_none()).count();
    let latest_capture = all_reports
        .iter()
        .filter_map(|r| r.bearing_capture_time)
        .fold(0.0, f64::max);
    let worst_bearing = all_reports
        .iter()
        .map(|r| r.steady_bearing_max_deviation)
        .fold(0.0, f64::max);
    lines.push((
        6,
        "bearing capture and steady bearing",
        line(
            aborted == 0 && uncaptured == 0 && worst_bearing <= 0.02,
            format!(
                "{uncaptured} runs never captured, latest capture {latest_capture:.2} s, \
                 worst deviation from pi/2 {worst_bearing:.5} rad (limit 0.02)"
            ),
        ),
    ));

    let descent = |b: &BatchReport| {
        reports(b).map(|rs| {
            (
                rs.iter().map(|r| r.lyapunov_violations).sum::<usize>(),
                rs.iter().filter(|r| r.lyapunov_violations > 0).count(),
                rs.iter().map(|r| r.lyapunov_max_rise).fold(0.0, f64::max),
            )
        })
    };
    let (smooth_v, smooth_runs, smooth_rise) = descent(&b1).unwrap_or((usize::MAX, RUNS, f64::NAN));
    let (signum_v, signum_runs, signum_rise) = descent(&b4).unwrap_or((usize::MAX, RUNS, f64::NAN));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = ControllerParams::new(0.01, 10.0, 1.0, Law::Smooth).unwrap();
    let worst_quadrature = (0..100)
        .map(|_| {
            let r: f64 = rng.random_range(10.0..60.0);
            let bearing: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let geom = RelativeGeometry {
                range: r,
                range_rate: -bearing.cos(),
                bearing,
            };
            let closed = lyapunov_smooth(&geom, &p).unwrap();
            (closed - common::smooth_lyapunov_quadrature(r, bearing, 10.0, 0.01)).abs()
        })
        .fold(0.0, f64::max);
    lines.push((
        7,
        "Lyapunov descent after capture",
        line(
            smooth_v == 0 && signum_v == 0 && worst_quadrature <= 1e-8,
            format!(
                "smooth: {smooth_v} violations, {smooth_runs} runs affected (max step rise {smooth_rise:.3e}); \
                 signum: {signum_v} violations, {signum_runs} runs affected (max step rise {signum_rise:.3e}); \
                 tolerance {:.3e}; quadrature worst error {worst_quadrature:.3e} (limit 1e-8)",
                circumnav_core::monitors::descent_tolerance(0.01)
            ),
        ),
    ));

    let neg_smooth = batch(ScenarioConfig {
        k: -0.01,
        ..reference(RUNS)
    });
    let neg_signum = batch(ScenarioConfig {
        k: -0.12,
        ..signum(RUNS)
    });
    let count = |rs: &[&RunReport], dir: Rotation| rs.iter().filter(|r| r.rotation == dir).count();
    let cw = count(&all_reports, Rotation::Clockwise);
    let neg: Vec<&RunReport> = [&neg_smooth, &neg_signum]
        .iter()
        .filter_map(|b| reports(b))
        .flatten()
        .collect();
    let ccw = count(&neg, Rotation::CounterClockwise);
    lines.push((
        8,
        "rotation direction",
        line(
            cw == all_reports.len() && aborted == 0 && ccw == neg.len() && neg.len() == 2 * RUNS,
            format!(
                "positive gain: {cw}/{} clockwise; negative gain: {ccw}/{} counterclockwise",
                all_reports.len(),
                2 * RUNS
            ),
        ),
    ));

    let errs = circle_endpoint_errors(&[0.1, 0.05, 0.025]);
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let half = batch(ScenarioConfig {
        dt: 0.005,
        ..reference(RUNS)
    });
    let radius_shift = match (reports(&b1), reports(&half)) {
        (Some(a), Some(b)) => a
            .iter()
            .zip(&b)
            .map(|(a, b)| (a.steady_radius_mean - b.steady_radius_mean).abs())
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    };
    lines.push((
        9,
        "integrator convergence",
        line(
            ratios.iter().all(|&q| q >= 8.0) && radius_shift < 0.01,
            format!(
                "circle endpoint errors [{}], halving ratios [{}] (limit >= 8); \
                 dt 0.01 -> 0.005 radius shift {radius_shift:.3e} m (limit 0.01)",
                join(&errs, |e| format!("{e:.3e}")),
                join(&ratios, |q| format!("{q:.2}")),
            ),
        ),
    ));

    let filtered = batch(ScenarioConfig {
        rdot_source: RdotSource::Filtered { tau: 0.5 },
        ..reference(RUNS)
    });
    lines.push((10, "filtered range rate", radius_band(&filtered, 10.9868, 0.05)));

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (a, b) = (report_bytes(dir_a.path()), report_bytes(dir_b.path()));
    lines.push((
        11,
        "deterministic report",
        line(a == b && !a.is_empty(), format!("two executions, {} and {} bytes, identical: {}", a.len(), b.len(), a == b)),
    ));

    let mut failed = 0;
    for (n, name, l) in &lines {
        if !l.pass {
            failed += 1;
        }
        println!("criterion {n:>2} {:<4} {name}: {}", if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        lines.len() - failed,
        lines.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
