//! Batch simulation front end.
//!
//! ```text
//! simulate --config scenario.json --runs 20 --seed 1 --out-dir out
//! ```
//!
//! Exits 0 iff every run completed and every monitor verdict passed, 1 if a
//! verdict failed, 2 on a usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::info;

use circumnav_core::harness::{self, BatchOptions, RdotSource, RunOutcome, ScenarioConfig};
use circumnav_core::Law;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Controller {
    Smooth,
    #[value(alias = "signum")]
    Sign,
}

#[derive(Debug, Parser)]
#[command(name = "simulate", about = "Range-only circumnavigation Monte Carlo runs", allow_negative_numbers = true)]
struct Args {
    /// Flat JSON scenario file; omitted keys take the reference smooth-law values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum)]
    controller: Option<Controller>,
    #[arg(long)]
    compensate_rd: bool,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    /// `truth` or `filter:<tau>`.
    #[arg(long)]
    rdot: Option<RdotSource>,
    #[arg(long)]
    k: Option<f64>,
    /// Write every n-th sample to the per-run CSV.
    #[arg(long, default_value_t = 1)]
    trace_stride: usize,
    /// Skip the per-run CSV files.
    #[arg(long)]
    no_traces: bool,
}

fn load_config(args: &Args) -> circumnav_core::Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| circumnav_core::Error::Io {
                path: path.clone(),
                source,
            })?;
            ScenarioConfig::from_json(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(runs) = args.runs {
        cfg.runs = runs;
    }
    if let Some(c) = args.controller {
        cfg.law = match c {
            Controller::Smooth => Law::Smooth,
            Controller::Sign => Law::Signum,
        };
    }
    if args.compensate_rd {
        cfg.compensate_rd = true;
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    if let Some(d) = args.duration {
        cfg.duration = d;
    }
    if let Some(src) = args.rdot {
        cfg.rdot_source = src;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    Ok(cfg)
}

fn run(args: &Args) -> circumnav_core::Result<bool> {
    let cfg = load_config(args)?;
    let scenario = cfg.resolve()?;
    info!(
        "law {} k={} r_d={} effective r_d={} expected radius={}",
        cfg.law, cfg.k, cfg.r_d, scenario.effective_r_d, scenario.expected_radius
    );

    std::fs::create_dir_all(&args.out_dir).map_err(|source| circumnav_core::Error::Io {
        path: args.out_dir.clone(),
        source,
    })?;
    let opts = BatchOptions {
        trace_dir: (!args.no_traces).then(|| args.out_dir.clone()),
        trace_stride: args.trace_stride,
    };
    let report = harness::run_batch(&scenario, &opts)?;
    harness::write_report_json(&report, &args.out_dir.join("report.json"))?;

    for rec in &report.runs {
        match &rec.outcome {
            RunOutcome::Completed { report: r } => {
                let failing: Vec<&str> = r
                    .theorem_verdicts
                    .iter()
                    .filter(|(_, &ok)| !ok)
                    .map(|(name, _)| name.as_str())
                    .collect();
                println!(
                    "run {:>3}: steady radius {:.4} m [{:.4}, {:.4}], rotation {:?}, C_d entries {}, {}",
                    rec.index,
                    r.steady_radius_mean,
                    r.steady_radius_min,
                    r.steady_radius_max,
                    r.rotation,
                    r.cd_entry_episodes,
                    if failing.is_empty() {
                        "PASS".to_owned()
                    } else {
                        format!("FAIL ({})", failing.join(", "))
                    }
                );
            }
            RunOutcome::Failed { diagnostic } => println!("run {:>3}: ABORTED: {diagnostic}", rec.index),
        }
    }
    let s = &report.summary;
    println!(
        "{} runs, {} completed, {} failed, expected radius {:.4} m: {}",
        s.runs,
        s.completed,
        s.failed,
        scenario.expected_radius,
        if s.all_pass { "PASS" } else { "FAIL" }
    );
    Ok(s.all_pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
