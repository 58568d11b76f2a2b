//! Monte Carlo batches: independent runs, merged by run index.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ResolvedEcho, ResolvedScenario};
use super::io::write_trace_csv_strided;
use super::sim::{initial_state_for_run, run_simulation, SimTrace};
use crate::error::{Error, Result};
use crate::geometry::UavState;
use crate::monitors::{evaluate, RunReport};

#[derive(Debug, Clone, Default)]
pub struct BatchOptions {
    /// Write `run_<idx>.csv` here when set.
    pub trace_dir: Option<PathBuf>,
    /// Keep every n-th sample in the CSV (1 = all).
    pub trace_stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

impl From<UavState> for Pose {
    fn from(s: UavState) -> Self {
        Pose {
            x: s.position.x,
            y: s.position.y,
            psi: s.heading(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunOutcome {
    Completed { report: RunReport },
    Failed { diagnostic: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub initial_state: Option<Pose>,
    #[serde(flatten)]
    pub outcome: RunOutcome,
}

impl RunRecord {
    pub fn report(&self) -> Option<&RunReport> {
        match &self.outcome {
            RunOutcome::Completed { report } => Some(report),
            RunOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub completed: usize,
    pub failed: usize,
    /// Number of runs failing each verdict.
    pub verdict_failures: BTreeMap<String, usize>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub config: ResolvedEcho,
    pub runs: Vec<RunRecord>,
    pub summary: BatchSummary,
}

/// Monitors applied to a finished trace with the scenario's thresholds.
pub fn evaluate_trace(scenario: &ResolvedScenario, trace: &SimTrace) -> Option<RunReport> {
    evaluate(&trace.samples, &scenario.monitor)
}

/// Simulates and evaluates run `index`, keeping the trace.
pub fn run_indexed(scenario: &ResolvedScenario, index: usize) -> Result<(SimTrace, RunReport)> {
    let initial = initial_state_for_run(scenario, index as u64)?;
    let trace = run_simulation(scenario, initial)?;
    let report = evaluate_trace(scenario, &trace).ok_or_else(|| Error::Config("empty trace".into()))?;
    Ok((trace, report))
}

fn run_one(scenario: &ResolvedScenario, index: usize, opts: &BatchOptions) -> Result<RunRecord> {
    let initial = match initial_state_for_run(scenario, index as u64) {
        Ok(s) => s,
        Err(e) => {
            return Ok(RunRecord {
                index,
                initial_state: None,
                outcome: RunOutcome::Failed { diagnostic: e.to_string() },
            })
        }
    };
    let outcome = match run_simulation(scenario, initial) {
        Ok(trace) => {
            if let Some(dir) = &opts.trace_dir {
                write_trace_csv_strided(&trace.samples, &dir.join(format!("run_{index}.csv")), opts.trace_stride)?;
            }
            match evaluate_trace(scenario, &trace) {
                Some(report) => RunOutcome::Completed { report },
                None => RunOutcome::Failed { diagnostic: "empty trace".into() },
            }
        }
        Err(e) => RunOutcome::Failed { diagnostic: e.to_string() },
    };
    Ok(RunRecord {
        index,
        initial_state: Some(initial.into()),
        outcome,
    })
}

/// Runs `config.runs` independent simulations. Simulation aborts become
/// failed entries; only I/O errors stop the batch.
pub fn run_batch(scenario: &ResolvedScenario, opts: &BatchOptions) -> Result<BatchReport> {
    let runs: Vec<RunRecord> = (0..scenario.config.runs)
        .into_par_iter()
        .map(|i| run_one(scenario, i, opts))
        .collect::<Result<_>>()?;
    Ok(assemble(scenario, runs))
}

fn assemble(scenario: &ResolvedScenario, mut runs: Vec<RunRecord>) -> BatchReport {
    runs.sort_by_key(|r| r.index);
    let mut verdict_failures = BTreeMap::new();
    let mut completed = 0;
    for report in runs.iter().filter_map(RunRecord::report) {
        completed += 1;
        for (name, &ok) in &report.theorem_verdicts {
            let entry = verdict_failures.entry(name.clone()).or_insert(0);
            if !ok {
                *entry += 1;
            }
        }
    }
    let failed = runs.len() - completed;
    let all_pass = failed == 0 && verdict_failures.values().all(|&n| n == 0);
    BatchReport {
        config: scenario.echo(),
        summary: BatchSummary {
            runs: runs.len(),
            completed,
            failed,
            verdict_failures,
            all_pass,
        },
        runs,
    }
}
