//! C ABI for abflux.
//!
//! Configurations and reports are opaque handles owned by the library and
//! released with their `_free` function. Every fallible call returns an
//! [`AbfluxStatus`]; the message of the most recent failure on the calling
//! thread is available from [`abflux_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use abflux::io::{parse_config, write_output_dir, ScenarioConfig};
use abflux::rotor::{energy_level, RotorParams};
use abflux::scenario::{run_scenario, ScenarioKind, ScenarioReport};
use abflux::Error;

/// Status codes. 0 to 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbfluxStatus {
    Ok = 0,
    VerdictFailed = 1,
    ConfigError = 2,
    NumericalError = 3,
    IoError = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Parsed scenario configuration.
pub struct AbfluxConfig {
    inner: ScenarioConfig,
}

/// Result of a scenario run.
pub struct AbfluxReport {
    inner: ScenarioReport,
    json: Vec<u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut v = msg.as_bytes().to_vec();
        v.retain(|b| *b != 0);
        v.push(0);
        *e.borrow_mut() = v;
    });
}

fn status_of(e: &Error) -> AbfluxStatus {
    match e.exit_code() {
        2 => AbfluxStatus::ConfigError,
        3 => AbfluxStatus::NumericalError,
        _ => AbfluxStatus::IoError,
    }
}

fn guard(f: impl FnOnce() -> Result<AbfluxStatus, (AbfluxStatus, String)>) -> AbfluxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            AbfluxStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (AbfluxStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (AbfluxStatus, String)> {
    if p.is_null() {
        return Err((AbfluxStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (AbfluxStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Copies `src` plus a terminating NUL into `buf` when it fits. Returns the
/// size needed including the NUL.
unsafe fn copy_out(src: &[u8], buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > src.len() {
        ptr::copy_nonoverlapping(src.as_ptr() as *const c_char, buf, src.len());
        *buf.add(src.len()) = 0;
    }
    src.len() + 1
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn abflux_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf`.
///
/// Returns the buffer size needed, including the terminating NUL; 1 when
/// there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn abflux_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let v = e.borrow();
        let msg = v.strip_suffix(&[0]).unwrap_or(&v);
        copy_out(msg, buf, len)
    })
}

/// Number of scenarios.
#[no_mangle]
pub extern "C" fn abflux_scenario_count() -> usize {
    ScenarioKind::ALL.len()
}

/// Static name of scenario `index`, or null when out of range.
#[no_mangle]
pub extern "C" fn abflux_scenario_name(index: usize) -> *const c_char {
    const NAMES: [&str; 5] = [
        "madelung-demo\0",
        "continuous-aspect\0",
        "instantaneous-aspect\0",
        "gauge-invariance\0",
        "flux-quantization-sweep\0",
    ];
    NAMES.get(index).map_or(ptr::null(), |s| s.as_ptr() as *const c_char)
}

/// Parses `key=value` text into a new configuration handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn abflux_config_parse(text: *const c_char, out: *mut *mut AbfluxConfig) -> AbfluxStatus {
    guard(|| {
        if out.is_null() {
            return Err((AbfluxStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let cfg = parse_config(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(AbfluxConfig { inner: cfg }));
        Ok(AbfluxStatus::Ok)
    })
}

/// Default configuration for the named scenario.
///
/// # Safety
/// `scenario` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn abflux_config_default(scenario: *const c_char, out: *mut *mut AbfluxConfig) -> AbfluxStatus {
    guard(|| {
        if out.is_null() {
            return Err((AbfluxStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let name = str_arg(scenario, "scenario")?;
        let kind = ScenarioKind::parse(name)
            .ok_or_else(|| (AbfluxStatus::ConfigError, format!("unknown scenario '{name}'")))?;
        *out = Box::into_raw(Box::new(AbfluxConfig { inner: ScenarioConfig::defaults(kind) }));
        Ok(AbfluxStatus::Ok)
    })
}

/// Writes the fully resolved configuration as `key=value` text.
///
/// Returns the size needed including the NUL, or 0 when `config` is null.
///
/// # Safety
/// `config` must be a live handle or null; `buf` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn abflux_config_echo(config: *const AbfluxConfig, buf: *mut c_char, len: usize) -> usize {
    match config.as_ref() {
        Some(c) => copy_out(c.inner.echo().as_bytes(), buf, len),
        None => 0,
    }
}

/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abflux_config_free(config: *mut AbfluxConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured scenario. When `out_dir` is non-null the report, CSV
/// series, snapshots and config echo are written there.
///
/// On success or verdict failure `*out` receives a report handle; the return
/// value is `Ok` when every verdict passed and `VerdictFailed` otherwise.
///
/// # Safety
/// `config` must be a live handle, `out_dir` null or a NUL-terminated string,
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn abflux_run(
    config: *const AbfluxConfig,
    out_dir: *const c_char,
    out: *mut *mut AbfluxReport,
) -> AbfluxStatus {
    guard(|| {
        if out.is_null() {
            return Err((AbfluxStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let cfg = &config.as_ref().ok_or((AbfluxStatus::NullPointer, "config is null".to_string()))?.inner;
        let output = run_scenario(cfg).map_err(lib_err)?;
        if !out_dir.is_null() {
            let dir = str_arg(out_dir, "out_dir")?;
            write_output_dir(cfg, &output, Path::new(dir)).map_err(lib_err)?;
        }
        let json = serde_json::to_vec(&output.report).map_err(|e| (AbfluxStatus::IoError, e.to_string()))?;
        let passed = output.report.all_passed();
        *out = Box::into_raw(Box::new(AbfluxReport { inner: output.report, json }));
        Ok(if passed { AbfluxStatus::Ok } else { AbfluxStatus::VerdictFailed })
    })
}

/// Number of verdicts in `report`, or 0 when it is null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn abflux_report_verdict_count(report: *const AbfluxReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.verdicts.len())
}

/// Reads verdict `index`. Any output pointer may be null.
///
/// # Safety
/// `report` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn abflux_report_verdict(
    report: *const AbfluxReport,
    index: usize,
    passed: *mut bool,
    measured: *mut f64,
    tolerance: *mut f64,
) -> AbfluxStatus {
    guard(|| {
        let r = report.as_ref().ok_or((AbfluxStatus::NullPointer, "report is null".to_string()))?;
        let v =
            r.inner.verdicts.get(index).ok_or((AbfluxStatus::OutOfRange, format!("verdict {index} out of range")))?;
        if let Some(p) = passed.as_mut() {
            *p = v.passed;
        }
        if let Some(p) = measured.as_mut() {
            *p = v.measured;
        }
        if let Some(p) = tolerance.as_mut() {
            *p = v.tolerance;
        }
        Ok(AbfluxStatus::Ok)
    })
}

/// Writes the report as JSON. Returns the size needed including the NUL, or 0
/// when `report` is null.
///
/// # Safety
/// `report` must be null or a live handle; `buf` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn abflux_report_json(report: *const AbfluxReport, buf: *mut c_char, len: usize) -> usize {
    match report.as_ref() {
        Some(r) => copy_out(&r.json, buf, len),
        None => 0,
    }
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abflux_report_free(report: *mut AbfluxReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Rotor level `E = ½[n²/I_c + (m − λn)²/I_e]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn abflux_rotor_energy(
    inertia_c: f64,
    inertia_e: f64,
    lambda: f64,
    n: i64,
    m: i64,
    out: *mut f64,
) -> AbfluxStatus {
    guard(|| {
        let out = out.as_mut().ok_or((AbfluxStatus::NullPointer, "out is null".to_string()))?;
        let p = RotorParams::new(inertia_c, inertia_e, lambda).map_err(lib_err)?;
        *out = energy_level(&p, n, m);
        Ok(AbfluxStatus::Ok)
    })
}
