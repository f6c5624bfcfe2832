//! C interface to the scenario runner. Scenarios and reports are opaque
//! handles owned by the caller and released with the matching `_free`.
//! Every fallible call returns a `KvcStatus`; the message of the most recent
//! failure on the calling thread is available from `kvc_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kvc_core::cli_harness::{self, ScenarioConfig};
use kvc_core::report::ResidualReport;
use kvc_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KvcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Numerical = 4,
    Contract = 5,
    Io = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// A validated scenario config.
pub struct KvcScenario {
    config: ScenarioConfig,
}

/// Check records in check_id order, with their ids kept as C strings.
pub struct KvcReport {
    report: ResidualReport,
    ids: Vec<CString>,
    abort: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> KvcStatus {
    match e {
        Error::Config(_) | Error::Json(_) => KvcStatus::Config,
        Error::Numerical(_) | Error::Precondition { .. } | Error::Projection { .. } => KvcStatus::Numerical,
        Error::Contract(_) => KvcStatus::Contract,
        Error::Io(_) => KvcStatus::Io,
    }
}

fn fail(status: KvcStatus, msg: impl Into<String>) -> KvcStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guarded(f: impl FnOnce() -> Result<(), (KvcStatus, String)>) -> KvcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KvcStatus::Ok,
        Ok(Err((s, msg))) => fail(s, msg),
        Err(_) => fail(KvcStatus::Panic, "internal panic"),
    }
}

fn core_err(e: Error) -> (KvcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (KvcStatus, String) {
    (KvcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn report_ref<'a>(report: *const KvcReport) -> Result<&'a KvcReport, (KvcStatus, String)> {
    report.as_ref().ok_or_else(|| null("report"))
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn kvc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kvc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates a JSON scenario. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_scenario_from_json(json: *const c_char, out: *mut *mut KvcScenario) -> KvcStatus {
    guarded(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json).to_str().map_err(|e| (KvcStatus::InvalidUtf8, e.to_string()))?;
        let config = ScenarioConfig::from_json(text).map_err(core_err)?;
        *out = Box::into_raw(Box::new(KvcScenario { config }));
        Ok(())
    })
}

/// Replaces the scenario seed.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kvc_scenario_set_seed(scenario: *mut KvcScenario, seed: u64) -> KvcStatus {
    guarded(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        s.config.seed = seed;
        Ok(())
    })
}

/// Writes the 64 hex digits of the config hash and a NUL into `buf`, which
/// must hold at least 65 bytes.
///
/// # Safety
/// `scenario` must be a live handle and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn kvc_scenario_hash(scenario: *const KvcScenario, buf: *mut c_char, len: usize) -> KvcStatus {
    guarded(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let hash = s.config.hash();
        if len < hash.len() + 1 {
            return Err((KvcStatus::OutOfRange, format!("buffer of {len} bytes is too small")));
        }
        ptr::copy_nonoverlapping(hash.as_ptr().cast::<c_char>(), buf, hash.len());
        *buf.add(hash.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kvc_scenario_free(scenario: *mut KvcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

#[derive(Clone, Copy)]
enum Suite {
    Identities,
    Variations,
    Flow,
}

unsafe fn run_suite(scenario: *const KvcScenario, out: *mut *mut KvcReport, suite: Suite) -> KvcStatus {
    guarded(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = &s.config;
        let outcome = match suite {
            Suite::Identities => cli_harness::identities(cfg),
            Suite::Variations => cli_harness::variations(cfg),
            Suite::Flow => cli_harness::flow(cfg).map(|(o, _)| o),
        }
        .map_err(core_err)?;
        let mut report = cli_harness::apply_tolerances(outcome.report, cfg, 1.0);
        report.sort();
        let ids = report
            .records
            .iter()
            .map(|r| CString::new(r.check_id.as_str()).map_err(|e| (KvcStatus::Contract, e.to_string())))
            .collect::<Result<_, _>>()?;
        let abort = outcome.abort.map(|a| CString::new(a.replace('\0', " ")).unwrap_or_default());
        *out = Box::into_raw(Box::new(KvcReport { report, ids, abort }));
        Ok(())
    })
}

/// Fixed-state identity checks.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_run_identities(scenario: *const KvcScenario, out: *mut *mut KvcReport) -> KvcStatus {
    run_suite(scenario, out, Suite::Identities)
}

/// Variation formulas against finite differences.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_run_variations(scenario: *const KvcScenario, out: *mut *mut KvcReport) -> KvcStatus {
    run_suite(scenario, out, Suite::Variations)
}

/// Flow run and its checks. A run that aborts part way still produces a
/// report; see `kvc_report_abort`.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_run_flow(scenario: *const KvcScenario, out: *mut *mut KvcReport) -> KvcStatus {
    run_suite(scenario, out, Suite::Flow)
}

/// Number of check records, or 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_len(report: *const KvcReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.records.len())
}

/// 1 if every hard check passed, 0 otherwise (and for NULL).
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_all_pass(report: *const KvcReport) -> c_int {
    report.as_ref().map_or(0, |r| r.report.all_pass() as c_int)
}

/// Abort message of a flow run, or NULL if it ran to the end. Owned by the report.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_abort(report: *const KvcReport) -> *const c_char {
    report.as_ref().and_then(|r| r.abort.as_ref()).map_or(ptr::null(), |s| s.as_ptr())
}

/// check_id of record `index`, or NULL when out of range. Owned by the report.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_check_id(report: *const KvcReport, index: usize) -> *const c_char {
    report.as_ref().and_then(|r| r.ids.get(index)).map_or(ptr::null(), |s| s.as_ptr())
}

/// Residual, tolerance and verdict of record `index`. `pass` is 1 for a
/// pass, 0 for a failure and 2 for a soft (diagnostic) record. Any output
/// pointer may be NULL.
///
/// # Safety
/// `report` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_record(
    report: *const KvcReport,
    index: usize,
    residual: *mut f64,
    tolerance: *mut f64,
    pass: *mut c_int,
) -> KvcStatus {
    guarded(|| {
        let r = report_ref(report)?;
        let n = r.report.records.len();
        let rec = r.report.records.get(index).ok_or_else(|| (KvcStatus::OutOfRange, format!("record {index} of {n}")))?;
        if !residual.is_null() {
            *residual = rec.residual;
        }
        if !tolerance.is_null() {
            *tolerance = rec.tolerance;
        }
        if !pass.is_null() {
            *pass = if rec.pass { 1 } else if rec.soft { 2 } else { 0 };
        }
        Ok(())
    })
}

/// Index of the record with this check_id.
///
/// # Safety
/// `report` must be a live handle, `check_id` NUL-terminated and `index` writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_find(report: *const KvcReport, check_id: *const c_char, index: *mut usize) -> KvcStatus {
    guarded(|| {
        let r = report_ref(report)?;
        if check_id.is_null() || index.is_null() {
            return Err(null("check_id or index"));
        }
        let id = CStr::from_ptr(check_id);
        let i = r.ids.iter().position(|s| s.as_c_str() == id);
        *index = i.ok_or_else(|| (KvcStatus::OutOfRange, format!("no check {}", id.to_string_lossy())))?;
        Ok(())
    })
}

/// The report as CSV. Release the string with `kvc_string_free`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_csv(report: *const KvcReport, out: *mut *mut c_char) -> KvcStatus {
    guarded(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let csv = CString::new(r.report.to_csv()).map_err(|e| (KvcStatus::Contract, e.to_string()))?;
        *out = csv.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kvc_report_free(report: *mut KvcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kvc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
