//! In-memory cohort store and the HTTP/JSON API on top of it.
//!
//! Reads of one cohort run concurrently; writes to one cohort are
//! serialized by its lock, so conflicting responses resolve first-wins.
//! Distinct cohorts never contend beyond the brief lookup in the index.

mod http;

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use chrono::{Duration, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

pub use http::{router, serve};

use crate::config::{ConfigError, FieldError, Mode, SimulationConfig};
use crate::dataset::{self, Bundle, DatasetError};
use crate::domain::{
    patient_timeline, utc, Alert, AlertId, AlertStatus, Cohort, HcpId, HcpProfile, PatientId, PatientProfile,
    ResponseAction, TimelineItem, Vital,
};
use crate::policy::{self, PolicyError, ResponseOutcome, ResponseRequest};
use crate::sim::{self, DayReport, Simulator};
use crate::stats::{cohort_stats, patient_summary, CohortStats, PatientSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorKind {
    Validation,
    NotFound,
    Conflict,
    InvalidMode,
    BadRequest,
}

/// Error body: machine-readable `kind`, human `message`, and the offending
/// config fields for validation errors.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub kind: ApiErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldError>,
}

impl ApiError {
    pub fn new(kind: ApiErrorKind, message: impl Into<String>) -> Self {
        ApiError { kind, message: message.into(), fields: Vec::new() }
    }

    fn not_found(what: &str, id: impl std::fmt::Display) -> Self {
        Self::new(ApiErrorKind::NotFound, format!("{what} {id} not found"))
    }
}

impl From<ConfigError> for ApiError {
    fn from(e: ConfigError) -> Self {
        let fields = match &e {
            ConfigError::Invalid(fields) => fields.clone(),
            ConfigError::Version(_) => vec![FieldError { field: "config_version".into(), message: e.to_string() }],
            _ => Vec::new(),
        };
        ApiError { kind: ApiErrorKind::Validation, message: e.to_string(), fields }
    }
}

impl From<PolicyError> for ApiError {
    fn from(e: PolicyError) -> Self {
        let kind = match e {
            PolicyError::NotFound { .. } => ApiErrorKind::NotFound,
            PolicyError::AlreadyResolved(_) => ApiErrorKind::Conflict,
            PolicyError::BeforeAlert { .. } => ApiErrorKind::BadRequest,
        };
        ApiError::new(kind, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortHandle {
    pub cohort_id: String,
    pub mode: Mode,
    /// Last simulated date; absent before the first day.
    pub clock: Option<NaiveDate>,
    pub days_simulated: u32,
    pub duration_days: u32,
    pub complete: bool,
    pub open_alert_count: usize,
}

impl CohortHandle {
    fn of(cohort_id: &str, cohort: &Cohort) -> Self {
        CohortHandle {
            cohort_id: cohort_id.to_owned(),
            mode: cohort.config.mode,
            clock: cohort.clock(),
            days_simulated: cohort.days_simulated,
            duration_days: cohort.config.duration_days,
            complete: cohort.is_complete(),
            open_alert_count: cohort.open_alert_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusFilter {
    Open,
    Resolved,
    #[default]
    All,
}

impl StatusFilter {
    fn admits(self, alert: &Alert) -> bool {
        match self {
            StatusFilter::Open => alert.status == AlertStatus::Open,
            StatusFilter::Resolved => alert.status == AlertStatus::Resolved,
            StatusFilter::All => true,
        }
    }
}

/// An alert with enough patient context to triage it from a list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlertView {
    #[serde(flatten)]
    pub alert: Alert,
    pub patient_name: String,
    pub vital: Vital,
    pub value: f64,
    pub unit: &'static str,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseSubmission {
    pub hcp_id: HcpId,
    pub action: ResponseAction,
    #[serde(default)]
    pub note: Option<String>,
    /// Defaults to the next free slot of the cohort's working day.
    #[serde(default, with = "utc::option")]
    pub timestamp: Option<NaiveDateTime>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvanceReport {
    #[serde(flatten)]
    pub report: DayReport,
    pub handle: CohortHandle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordedResponse {
    #[serde(flatten)]
    pub outcome: ResponseOutcome,
    pub alert: Alert,
    pub handle: CohortHandle,
}

/// All cohorts served by one process.
#[derive(Default)]
pub struct Store {
    cohorts: RwLock<BTreeMap<String, Arc<RwLock<Cohort>>>>,
    created: std::sync::atomic::AtomicU64,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&self, cohort_id: &str) -> Result<Arc<RwLock<Cohort>>, ApiError> {
        self.cohorts
            .read()
            .expect("store lock poisoned")
            .get(cohort_id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("cohort", cohort_id))
    }

    fn read<T>(&self, cohort_id: &str, f: impl FnOnce(&Cohort) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let cohort = self.get(cohort_id)?;
        let guard = cohort.read().expect("cohort lock poisoned");
        f(&guard)
    }

    fn write<T>(&self, cohort_id: &str, f: impl FnOnce(&mut Cohort) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let cohort = self.get(cohort_id)?;
        let mut guard = cohort.write().expect("cohort lock poisoned");
        f(&mut guard)
    }

    /// Adds an existing cohort, e.g. one imported from a bundle.
    pub fn insert(&self, cohort: Cohort) -> CohortHandle {
        let n = self.created.fetch_add(1, std::sync::atomic::Ordering::SeqCst) + 1;
        let cohort_id = format!("cohort-{n}");
        let handle = CohortHandle::of(&cohort_id, &cohort);
        self.cohorts.write().expect("store lock poisoned").insert(cohort_id, Arc::new(RwLock::new(cohort)));
        handle
    }

    /// Simulates a new cohort: to completion in batch mode, up to the first
    /// halt in interactive mode.
    pub fn create_cohort(&self, config: SimulationConfig) -> Result<CohortHandle, ApiError> {
        let config = config.validated()?;
        Ok(self.insert(Simulator::new(config).run()))
    }

    /// Like [`Store::create_cohort`] from a JSON config object with defaults
    /// for missing fields.
    pub fn create_cohort_json(&self, config: serde_json::Value) -> Result<CohortHandle, ApiError> {
        let config = SimulationConfig::from_json_value(config)?;
        Ok(self.insert(Simulator::new(config).run()))
    }

    pub fn cohort_ids(&self) -> Vec<String> {
        self.cohorts.read().expect("store lock poisoned").keys().cloned().collect()
    }

    pub fn handle(&self, cohort_id: &str) -> Result<CohortHandle, ApiError> {
        self.read(cohort_id, |c| Ok(CohortHandle::of(cohort_id, c)))
    }

    /// A copy of the stored cohort.
    pub fn snapshot(&self, cohort_id: &str) -> Result<Cohort, ApiError> {
        self.read(cohort_id, |c| Ok(c.clone()))
    }

    /// Resumes an interactive cohort for up to `days` days. Refused while
    /// alerts are waiting; a complete cohort reports zero days.
    pub fn advance(&self, cohort_id: &str, days: u32) -> Result<AdvanceReport, ApiError> {
        self.write(cohort_id, |c| {
            if c.config.mode != Mode::Interactive {
                return Err(ApiError::new(ApiErrorKind::InvalidMode, "only interactive cohorts can be advanced"));
            }
            let pending = c.open_alert_count();
            if pending > 0 {
                let oldest = c.alerts.iter().filter(|a| a.is_open()).min_by_key(|a| (a.created_at, a.id));
                let oldest = oldest.map(|a| a.id.to_string()).unwrap_or_default();
                return Err(ApiError::new(
                    ApiErrorKind::Conflict,
                    format!("{pending} alerts are still open (oldest {oldest}); respond to them before advancing"),
                ));
            }
            let report = sim::resume(c, days);
            Ok(AdvanceReport { report, handle: CohortHandle::of(cohort_id, c) })
        })
    }

    /// Alerts oldest first.
    pub fn list_alerts(&self, cohort_id: &str, filter: StatusFilter) -> Result<Vec<AlertView>, ApiError> {
        self.read(cohort_id, |c| {
            let mut alerts: Vec<&Alert> = c.alerts.iter().filter(|a| filter.admits(a)).collect();
            alerts.sort_by_key(|a| (a.created_at, a.id));
            Ok(alerts
                .into_iter()
                .filter_map(|a| {
                    let m = c.measurement(a.measurement_id)?;
                    let p = c.patient(a.patient_id)?;
                    Some(AlertView {
                        alert: a.clone(),
                        patient_name: p.display_name.clone(),
                        vital: m.vital,
                        value: m.value,
                        unit: m.vital.unit(),
                        comment: m.comment.clone(),
                    })
                })
                .collect())
        })
    }

    /// Records a human response with the same side effects as a scripted one.
    pub fn submit_response(
        &self,
        cohort_id: &str,
        alert_id: AlertId,
        submission: ResponseSubmission,
    ) -> Result<RecordedResponse, ApiError> {
        self.write(cohort_id, |c| {
            let timestamp = match submission.timestamp {
                Some(t) => t,
                None => next_response_slot(c, alert_id)?,
            };
            let request = ResponseRequest {
                alert_id,
                hcp_id: submission.hcp_id,
                action: submission.action,
                timestamp,
                note: submission.note.filter(|n| !n.trim().is_empty()),
            };
            let outcome = policy::apply_response(c, request)?;
            let alert = c.alert(alert_id).cloned().expect("alert exists after response");
            Ok(RecordedResponse { outcome, alert, handle: CohortHandle::of(cohort_id, c) })
        })
    }

    pub fn patients(&self, cohort_id: &str) -> Result<Vec<PatientProfile>, ApiError> {
        self.read(cohort_id, |c| Ok(c.patients.clone()))
    }

    pub fn hcps(&self, cohort_id: &str) -> Result<Vec<HcpProfile>, ApiError> {
        self.read(cohort_id, |c| Ok(c.hcps.clone()))
    }

    pub fn timeline(&self, cohort_id: &str, patient_id: PatientId) -> Result<Vec<TimelineItem>, ApiError> {
        self.read(cohort_id, |c| {
            patient_timeline(c, patient_id).map_err(|_| ApiError::not_found("patient", patient_id))
        })
    }

    pub fn summary(&self, cohort_id: &str, patient_id: PatientId) -> Result<PatientSummary, ApiError> {
        self.read(cohort_id, |c| {
            patient_summary(c, patient_id).ok_or_else(|| ApiError::not_found("patient", patient_id))
        })
    }

    pub fn stats(&self, cohort_id: &str) -> Result<CohortStats, ApiError> {
        self.read(cohort_id, |c| Ok(cohort_stats(c)))
    }

    /// The cohort as a bundle, with export-time messiness applied to a copy.
    pub fn export(&self, cohort_id: &str) -> Result<Bundle, ApiError> {
        let mut cohort = self.snapshot(cohort_id)?;
        sim::inject_messiness(&mut cohort);
        dataset::render(&cohort).map_err(|e| match e {
            DatasetError::Validation(report) => ApiError::new(ApiErrorKind::Validation, report.to_string()),
            other => ApiError::new(ApiErrorKind::BadRequest, other.to_string()),
        })
    }
}

/// 13:00 on the cohort's current day plus one minute per response already
/// given that day, never before the alert itself.
fn next_response_slot(cohort: &Cohort, alert_id: AlertId) -> Result<NaiveDateTime, ApiError> {
    let alert = cohort.alert(alert_id).ok_or_else(|| ApiError::not_found("alert", alert_id))?;
    let day = cohort.clock().unwrap_or(cohort.config.start_date).max(alert.created_at.date());
    let used = cohort.responses.iter().filter(|r| r.timestamp.date() == day).count() as i64;
    Ok((policy::workday_start(day) + Duration::minutes(used)).max(alert.created_at))
}
