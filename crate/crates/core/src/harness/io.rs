//! Trace CSV and batch report JSON.
//!
//! Floats are written with 9 significant digits in both formats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::batch::BatchReport;
use crate::error::{Error, Result};
use crate::monitors::TraceSample;

pub const TRACE_COLUMNS: [&str; 10] = [
    "t", "x", "y", "psi", "r", "theta_b", "omega", "rdot_true", "rdot_est", "lyap",
];

const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds to 9 significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// One CSV row. Optional columns are empty when undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub r: f64,
    pub theta_b: f64,
    pub omega: f64,
    pub rdot_true: f64,
    pub rdot_est: Option<f64>,
    pub lyap: Option<f64>,
}

impl TraceRow {
    pub fn from_sample(s: &TraceSample) -> Self {
        Self {
            t: round_sig(s.t),
            x: round_sig(s.state.position.x),
            y: round_sig(s.state.position.y),
            psi: round_sig(s.state.heading()),
            r: round_sig(s.geom.range),
            theta_b: round_sig(s.geom.bearing),
            omega: round_sig(s.omega),
            rdot_true: round_sig(s.geom.range_rate),
            rdot_est: s.r_dot_est.map(round_sig),
            lyap: s.lyap.map(round_sig),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every `stride`-th sample (always including the first).
pub fn write_trace_csv_strided(samples: &[TraceSample], path: &Path, stride: usize) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    w.write_record(TRACE_COLUMNS)?;
    for s in samples.iter().step_by(stride.max(1)) {
        w.serialize(TraceRow::from_sample(s))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_trace_csv(samples: &[TraceSample], path: &Path) -> Result<()> {
    write_trace_csv_strided(samples, path, 1)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(TRACE_COLUMNS.iter().copied()) {
        return Err(Error::Config(format!("unexpected trace columns: {headers:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(rounded) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = rounded;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 9 significant digits.
pub fn report_to_json(report: &BatchReport) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    round_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_report_json(report: &BatchReport, path: &Path) -> Result<()> {
    let text = report_to_json(report)?;
    let mut file = File::create(path).map_err(io_err(path))?;
    file.write_all(text.as_bytes()).map_err(io_err(path))?;
    Ok(())
}
