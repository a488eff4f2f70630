//! C ABI over the rpmsim simulator.
//!
//! Every function returns an [`RpmsimStatus`]. On failure the message is
//! available from [`rpmsim_last_error`] on the same thread until the next
//! call. Cohorts are opaque [`RpmsimCohort`] handles released with
//! [`rpmsim_cohort_free`]; strings returned through out-parameters are
//! released with [`rpmsim_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rpmsim::dataset::{self, DatasetError};
use rpmsim::domain::{AlertId, HcpId, ResponseAction};
use rpmsim::service::{ApiError, ApiErrorKind, ResponseSubmission, StatusFilter, Store};

/// Result codes. The numeric values of `Io`, `Format` and `Validation`
/// match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpmsimStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Format = 4,
    Validation = 5,
    NotFound = 6,
    Conflict = 7,
    InvalidMode = 8,
    BadRequest = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpmsimAction {
    CallPatient = 0,
    AdjustMedication = 1,
    ContactColleague = 2,
    Dismiss = 3,
}

impl From<RpmsimAction> for ResponseAction {
    fn from(a: RpmsimAction) -> Self {
        match a {
            RpmsimAction::CallPatient => ResponseAction::CallPatient,
            RpmsimAction::AdjustMedication => ResponseAction::AdjustMedication,
            RpmsimAction::ContactColleague => ResponseAction::ContactColleague,
            RpmsimAction::Dismiss => ResponseAction::Dismiss,
        }
    }
}

/// Snapshot of a cohort's progress and sizes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RpmsimInfo {
    pub days_simulated: u32,
    pub duration_days: u32,
    pub complete: bool,
    pub interactive: bool,
    pub patient_count: u64,
    pub measurement_count: u64,
    pub alert_count: u64,
    pub open_alert_count: u64,
    pub response_count: u64,
    pub alert_rate: f64,
}

/// Outcome of [`rpmsim_cohort_advance`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RpmsimDayReport {
    pub days_advanced: u32,
    pub new_measurements: u64,
    pub new_alerts: u64,
    pub halted: bool,
    pub complete: bool,
}

/// Opaque cohort handle.
pub struct RpmsimCohort {
    store: Store,
    id: String,
}

impl RpmsimCohort {
    fn new(store: Store, id: String) -> *mut RpmsimCohort {
        Box::into_raw(Box::new(RpmsimCohort { store, id }))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RpmsimStatus, String);

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        let status = match e.kind {
            ApiErrorKind::Validation => RpmsimStatus::Validation,
            ApiErrorKind::NotFound => RpmsimStatus::NotFound,
            ApiErrorKind::Conflict => RpmsimStatus::Conflict,
            ApiErrorKind::InvalidMode => RpmsimStatus::InvalidMode,
            ApiErrorKind::BadRequest => RpmsimStatus::BadRequest,
        };
        let mut message = e.message;
        for f in &e.fields {
            message += &format!("; {}: {}", f.field, f.message);
        }
        Failure(status, message)
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        let status = match e {
            DatasetError::Io { .. } => RpmsimStatus::Io,
            DatasetError::Format { .. } | DatasetError::Version { .. } => RpmsimStatus::Format,
            DatasetError::Validation(_) => RpmsimStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RpmsimStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RpmsimStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RpmsimStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RpmsimStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(RpmsimStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn cohort<'a>(h: *const RpmsimCohort) -> Result<&'a RpmsimCohort, Failure> {
    h.as_ref().ok_or_else(|| null("cohort"))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Failure(RpmsimStatus::Format, e.to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rpmsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rpmsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Simulates a cohort from a JSON config object. `config_json` may be null
/// for the defaults; missing fields take their defaults. Batch cohorts run
/// to completion, interactive ones to their first halt.
///
/// # Safety
/// `config_json` is null or a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_new(config_json: *const c_char, out: *mut *mut RpmsimCohort) -> RpmsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = if config_json.is_null() {
            serde_json::json!({})
        } else {
            serde_json::from_str(text(config_json, "config_json")?)
                .map_err(|e| Failure(RpmsimStatus::Format, format!("config_json: {e}")))?
        };
        let store = Store::new();
        let handle = store.create_cohort_json(config)?;
        *out = RpmsimCohort::new(store, handle.cohort_id);
        Ok(())
    })
}

/// Imports a bundle directory.
///
/// # Safety
/// `dir` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_import(dir: *const c_char, out: *mut *mut RpmsimCohort) -> RpmsimStatus {
    guard(|| {
        let dir = text(dir, "dir")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let store = Store::new();
        let handle = store.insert(dataset::import(Path::new(dir))?);
        *out = RpmsimCohort::new(store, handle.cohort_id);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `cohort` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_free(cohort: *mut RpmsimCohort) {
    if !cohort.is_null() {
        drop(Box::from_raw(cohort));
    }
}

/// # Safety
/// `cohort` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_info(cohort: *const RpmsimCohort, out: *mut RpmsimInfo) -> RpmsimStatus {
    guard(|| {
        let c = self::cohort(cohort)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let handle = c.store.handle(&c.id)?;
        let stats = c.store.stats(&c.id)?;
        *out = RpmsimInfo {
            days_simulated: handle.days_simulated,
            duration_days: handle.duration_days,
            complete: handle.complete,
            interactive: handle.mode == rpmsim::config::Mode::Interactive,
            patient_count: c.store.patients(&c.id)?.len() as u64,
            measurement_count: stats.measurement_count as u64,
            alert_count: stats.alert_count as u64,
            open_alert_count: stats.open_alert_count as u64,
            response_count: stats.response_count as u64,
            alert_rate: stats.alert_rate,
        };
        Ok(())
    })
}

/// Resumes an interactive cohort for up to `days` days. Fails with
/// `Conflict` while alerts are open. `out` may be null.
///
/// # Safety
/// `cohort` is a live handle; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_advance(
    cohort: *mut RpmsimCohort,
    days: u32,
    out: *mut RpmsimDayReport,
) -> RpmsimStatus {
    guard(|| {
        let c = self::cohort(cohort)?;
        let r = c.store.advance(&c.id, days)?.report;
        if let Some(out) = out.as_mut() {
            *out = RpmsimDayReport {
                days_advanced: r.days_advanced,
                new_measurements: r.new_measurements as u64,
                new_alerts: r.new_alerts as u64,
                halted: r.halted,
                complete: r.complete,
            };
        }
        Ok(())
    })
}

/// Records an HCP response to alert number `alert_id` (the digits of
/// `A000042`) by HCP number `hcp_id`, at the next free working slot.
/// `note` may be null for a generated note.
///
/// # Safety
/// `cohort` is a live handle; `note` is null or a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_respond(
    cohort: *mut RpmsimCohort,
    alert_id: u32,
    hcp_id: u32,
    action: RpmsimAction,
    note: *const c_char,
) -> RpmsimStatus {
    guard(|| {
        let c = self::cohort(cohort)?;
        let note = if note.is_null() { None } else { Some(text(note, "note")?.to_owned()) };
        let submission = ResponseSubmission { hcp_id: HcpId(hcp_id), action: action.into(), note, timestamp: None };
        c.store.submit_response(&c.id, AlertId(alert_id), submission)?;
        Ok(())
    })
}

/// Writes the cohort as a bundle into the existing directory `dir`, with
/// the configured messiness applied to the written copy.
///
/// # Safety
/// `cohort` is a live handle; `dir` is a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_export(cohort: *const RpmsimCohort, dir: *const c_char) -> RpmsimStatus {
    guard(|| {
        let c = self::cohort(cohort)?;
        let dir = text(dir, "dir")?;
        c.store.export(&c.id)?.write_to(Path::new(dir))?;
        Ok(())
    })
}

/// Cohort statistics as a JSON object. Free with [`rpmsim_string_free`].
///
/// # Safety
/// `cohort` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_stats_json(cohort: *const RpmsimCohort, out: *mut *mut c_char) -> RpmsimStatus {
    guard(|| {
        let c = self::cohort(cohort)?;
        let stats = c.store.stats(&c.id)?;
        give_string(serde_json::to_string(&stats).expect("stats serialize"), out)
    })
}

/// Alerts, oldest first, as a JSON array; only open ones when `open_only`.
/// Free with [`rpmsim_string_free`].
///
/// # Safety
/// `cohort` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_cohort_alerts_json(
    cohort: *const RpmsimCohort,
    open_only: bool,
    out: *mut *mut c_char,
) -> RpmsimStatus {
    guard(|| {
        let c = self::cohort(cohort)?;
        let filter = if open_only { StatusFilter::Open } else { StatusFilter::All };
        let alerts = c.store.list_alerts(&c.id, filter)?;
        give_string(serde_json::to_string(&alerts).expect("alerts serialize"), out)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rpmsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
