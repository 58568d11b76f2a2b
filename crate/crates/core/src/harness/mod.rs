//! Scenario configuration, the simulation loop, Monte Carlo batches and file output.

pub mod batch;
pub mod config;
pub mod io;
pub mod sim;

pub use batch::{run_batch, run_indexed, BatchOptions, BatchReport, RunOutcome, RunRecord};
pub use config::{InitSpec, RdotSource, ResolvedScenario, ScenarioConfig};
pub use io::{read_trace_csv, write_report_json, write_trace_csv};
pub use sim::{run_simulation, sample_initial_state, SimTrace};
