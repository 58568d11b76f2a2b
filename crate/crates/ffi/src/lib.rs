//! C ABI over `circumnav-core`.
//!
//! Every function returns a [`CircumnavStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`circumnav_last_error`]. Handles are opaque and must be released with the
//! matching `*_free` function. Strings handed out by the library are released
//! with [`circumnav_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circumnav_core::harness::io::report_to_json;
use circumnav_core::harness::{run_batch, run_indexed, BatchOptions, BatchReport, SimTrace};
use circumnav_core::{controllers, Error, ResolvedScenario, ScenarioConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircumnavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Singularity = 3,
    Config = 4,
    Io = 5,
    Serialization = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Resolved scenario.
pub struct CircumnavScenario(ResolvedScenario);

/// Samples of one simulated run.
pub struct CircumnavTrace(SimTrace);

/// Result of a Monte Carlo batch.
pub struct CircumnavBatch(BatchReport);

/// One trace sample. `rdot_est` and `lyap` are NaN when undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CircumnavSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub r: f64,
    pub theta_b: f64,
    pub omega: f64,
    pub rdot_true: f64,
    pub rdot_est: f64,
    pub lyap: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CircumnavStatus {
    match e {
        Error::Singularity { .. } | Error::ZeroRange { .. } => CircumnavStatus::Singularity,
        Error::Io { .. } => CircumnavStatus::Io,
        Error::Csv(_) | Error::Json(_) => CircumnavStatus::Serialization,
        Error::Config(_) => CircumnavStatus::Config,
        _ => CircumnavStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (CircumnavStatus, String)>) -> CircumnavStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CircumnavStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CircumnavStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (CircumnavStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CircumnavStatus, String) {
    (CircumnavStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (CircumnavStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (CircumnavStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn circumnav_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn circumnav_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Steady orbit radius of the smooth law.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_predicted_radius(r_d: f64, k: f64, out: *mut f64) -> CircumnavStatus {
    guard(|| {
        let r = controllers::predicted_radius(r_d, k).map_err(core_err)?;
        write_out(out, r)
    })
}

/// Commanded radius that makes the smooth law settle on `r_d`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_compensated_rd(r_d: f64, k: f64, out: *mut f64) -> CircumnavStatus {
    guard(|| {
        let r = controllers::compensated_rd(r_d, k).map_err(core_err)?;
        write_out(out, r)
    })
}

/// Reference smooth-law scenario.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_scenario_default(out: *mut *mut CircumnavScenario) -> CircumnavStatus {
    guard(|| {
        let s = ScenarioConfig::default().resolve().map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(CircumnavScenario(s))))
    })
}

/// Parses a JSON scenario. Omitted keys take the reference values.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_scenario_from_json(
    json: *const c_char,
    out: *mut *mut CircumnavScenario,
) -> CircumnavStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (CircumnavStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let s = ScenarioConfig::from_json(text)
            .and_then(|c| c.resolve())
            .map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(CircumnavScenario(s))))
    })
}

/// # Safety
/// `scenario` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn circumnav_scenario_free(scenario: *mut CircumnavScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Orbit radius the monitors expect for this scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_scenario_expected_radius(
    scenario: *const CircumnavScenario,
    out: *mut f64,
) -> CircumnavStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        write_out(out, s.0.expected_radius)
    })
}

/// Simulates run `index` of the scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_run(
    scenario: *const CircumnavScenario,
    index: usize,
    out: *mut *mut CircumnavTrace,
) -> CircumnavStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let (trace, _) = run_indexed(&s.0, index).map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(CircumnavTrace(trace))))
    })
}

/// # Safety
/// `trace` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn circumnav_trace_free(trace: *mut CircumnavTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// # Safety
/// `trace` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_trace_len(trace: *const CircumnavTrace, out: *mut usize) -> CircumnavStatus {
    guard(|| {
        let t = deref(trace, "trace")?;
        write_out(out, t.0.samples.len())
    })
}

/// # Safety
/// `trace` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_trace_sample(
    trace: *const CircumnavTrace,
    index: usize,
    out: *mut CircumnavSample,
) -> CircumnavStatus {
    guard(|| {
        let t = deref(trace, "trace")?;
        let s = t.0.samples.get(index).ok_or_else(|| {
            (
                CircumnavStatus::OutOfRange,
                format!("sample {index} of {}", t.0.samples.len()),
            )
        })?;
        let sample = CircumnavSample {
            t: s.t,
            x: s.state.position.x,
            y: s.state.position.y,
            psi: s.state.heading(),
            r: s.geom.range,
            theta_b: s.geom.bearing,
            omega: s.omega,
            rdot_true: s.geom.range_rate,
            rdot_est: s.r_dot_est.unwrap_or(f64::NAN),
            lyap: s.lyap.unwrap_or(f64::NAN),
        };
        write_out(out, sample)
    })
}

/// Runs every run of the scenario without writing trace files.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_run_batch(
    scenario: *const CircumnavScenario,
    out: *mut *mut CircumnavBatch,
) -> CircumnavStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let report = run_batch(&s.0, &BatchOptions::default()).map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(CircumnavBatch(report))))
    })
}

/// # Safety
/// `batch` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn circumnav_batch_free(batch: *mut CircumnavBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Whether every run completed and passed every verdict.
///
/// # Safety
/// `batch` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_batch_all_pass(batch: *const CircumnavBatch, out: *mut bool) -> CircumnavStatus {
    guard(|| {
        let b = deref(batch, "batch")?;
        write_out(out, b.0.summary.all_pass)
    })
}

/// The batch report as JSON, identical to the CLI's `report.json`. Release
/// with [`circumnav_string_free`].
///
/// # Safety
/// `batch` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn circumnav_batch_report_json(
    batch: *const CircumnavBatch,
    out: *mut *mut c_char,
) -> CircumnavStatus {
    guard(|| {
        let b = deref(batch, "batch")?;
        let text = report_to_json(&b.0).map_err(core_err)?;
        let c = CString::new(text).map_err(|e| (CircumnavStatus::Serialization, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}
