//! Dataset bundles: one CSV file per entity kind plus a manifest and the
//! truth ledger.
//!
//! | file                     | columns |
//! |--------------------------|---------|
//! | `patients.csv`           | see [`PATIENT_COLUMNS`] |
//! | `hcps.csv`               | `hcp_id,display_name,role,experience,confidence,doc_style,duty_days` |
//! | `measurements.csv`       | `measurement_id,patient_id,timestamp,vital,value,unit,comment` |
//! | `alerts.csv`             | `alert_id,patient_id,measurement_id,created_at,rules,severity,status,assigned_hcp_id` |
//! | `responses.csv`          | `response_id,alert_id,hcp_id,timestamp,action,note` |
//! | `medication_changes.csv` | `medication_change_id,patient_id,timestamp,drug,change,effect_vital,effect_direction,effect_magnitude,onset_days` |
//! | `admissions.csv`         | `admission_id,patient_id,start,end,reason` |
//! | `consultations.csv`      | `consultation_id,patient_id,hcp_id,timestamp,channel,text` |
//! | `truth_ledger.json`      | array of `{kind, original_id, injected_id}` |
//! | `manifest.json`          | format version, seed, config echo, clock, row counts |
//!
//! Event rows are sorted by (timestamp, id), profiles by id. Timestamps are
//! ISO-8601 UTC, lists inside a cell are `;`-separated, and every file ends
//! lines with `\n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::SimulationConfig;
use crate::domain::{
    format_rules, parse_rules, utc, validate_cohort, Admission, AdmissionId, Alert, AlertId, AlertResponse, AlertRule,
    AlertStatus, Channel, Cohort, Consultation, ConsultationId, Direction, DocStyle, DutyDays, Experience, HcpId,
    HcpProfile, HcpRole, HomeSupport, Measurement, MeasurementId, MedicationChange, MedicationChangeId,
    MedicationChangeKind, MedicationEffect, PatientId, PatientProfile, ResponseAction, ResponseId, Severity,
    StabilityClass, Threshold, ValidationReport, Vital, VitalMap,
};

pub const FORMAT_VERSION: u32 = 1;

pub const PATIENTS: &str = "patients.csv";
pub const HCPS: &str = "hcps.csv";
pub const MEASUREMENTS: &str = "measurements.csv";
pub const ALERTS: &str = "alerts.csv";
pub const RESPONSES: &str = "responses.csv";
pub const MEDICATION_CHANGES: &str = "medication_changes.csv";
pub const ADMISSIONS: &str = "admissions.csv";
pub const CONSULTATIONS: &str = "consultations.csv";
pub const TRUTH_LEDGER: &str = "truth_ledger.json";
pub const MANIFEST: &str = "manifest.json";

pub const ENTITY_FILES: [&str; 8] =
    [PATIENTS, HCPS, MEASUREMENTS, ALERTS, RESPONSES, MEDICATION_CHANGES, ADMISSIONS, CONSULTATIONS];

/// Every file of a bundle, in archive order.
pub const ALL_FILES: [&str; 10] = [
    MANIFEST,
    PATIENTS,
    HCPS,
    MEASUREMENTS,
    ALERTS,
    RESPONSES,
    MEDICATION_CHANGES,
    ADMISSIONS,
    CONSULTATIONS,
    TRUTH_LEDGER,
];

pub const PATIENT_COLUMNS: &[&str] = &[
    "patient_id",
    "display_name",
    "age",
    "comorbidities",
    "stability_class",
    "adherence",
    "home_support",
    "enrollment_date",
    "baseline_weight",
    "baseline_systolic_bp",
    "baseline_diastolic_bp",
    "baseline_heart_rate",
    "low_weight",
    "high_weight",
    "low_systolic_bp",
    "high_systolic_bp",
    "low_diastolic_bp",
    "high_diastolic_bp",
    "low_heart_rate",
    "high_heart_rate",
];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: {message}")]
    Format { file: String, message: String },
    #[error("unsupported format_version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("bundle failed validation:\n{0}")]
    Validation(ValidationReport),
}

impl DatasetError {
    fn format(file: &str, message: impl fmt::Display) -> Self {
        DatasetError::Format { file: file.to_owned(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub seed: u64,
    pub days_simulated: u32,
    pub config: SimulationConfig,
    pub row_counts: BTreeMap<String, usize>,
    /// Reminder that the ledger is provenance, not simulated data.
    pub truth_ledger_note: String,
}

const LEDGER_NOTE: &str =
    "truth_ledger.json lists injected duplicates and off-topic comments; it is not part of the simulated world";

/// The rendered files of a bundle, keyed by file name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bundle {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Bundle {
    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }

    /// Writes every file into an existing directory.
    pub fn write_to(&self, dir: &Path) -> Result<(), DatasetError> {
        if !dir.is_dir() {
            return Err(DatasetError::Io {
                path: dir.to_owned(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "destination directory does not exist"),
            });
        }
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|source| DatasetError::Io { path, source })?;
        }
        Ok(())
    }

    /// Reads the bundle files present in `dir`; absent files are reported
    /// by [`Bundle::parse`].
    pub fn read_from(dir: &Path) -> Result<Self, DatasetError> {
        if !dir.is_dir() {
            return Err(DatasetError::Io {
                path: dir.to_owned(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "bundle directory does not exist"),
            });
        }
        let mut files = BTreeMap::new();
        for name in ALL_FILES {
            let path = dir.join(name);
            match std::fs::read(&path) {
                Ok(bytes) => {
                    files.insert(name.to_owned(), bytes);
                }
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(source) => return Err(DatasetError::Io { path, source }),
            }
        }
        Ok(Bundle { files })
    }

    /// A tar archive of the bundle with fixed metadata, so equal bundles
    /// give equal bytes.
    pub fn to_tar(&self) -> Vec<u8> {
        let mut builder = tar::Builder::new(Vec::new());
        for name in ALL_FILES {
            let Some(bytes) = self.files.get(name) else { continue };
            let mut header = tar::Header::new_ustar();
            header.set_size(bytes.len() as u64);
            header.set_mode(0o644);
            header.set_mtime(0);
            header.set_entry_type(tar::EntryType::Regular);
            builder.append_data(&mut header, name, bytes.as_slice()).expect("writing to memory cannot fail");
        }
        builder.into_inner().expect("writing to memory cannot fail")
    }

    pub fn manifest(&self) -> Result<Manifest, DatasetError> {
        let bytes = self.get(MANIFEST).ok_or_else(|| DatasetError::format("manifest", "file is missing"))?;
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| DatasetError::format("manifest", e))?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| DatasetError::format("manifest", "format_version is missing"))?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(DatasetError::Version { found: found.try_into().unwrap_or(u32::MAX) });
        }
        serde_json::from_value(value).map_err(|e| DatasetError::format("manifest", e))
    }

    /// Rebuilds the cohort and checks it. Collections come back in id order.
    pub fn parse(&self) -> Result<Cohort, DatasetError> {
        let manifest = self.manifest()?;
        let mut cohort = Cohort::empty(manifest.config);
        cohort.days_simulated = manifest.days_simulated;

        cohort.patients = self.rows::<PatientRow>(PATIENTS)?.into_iter().map(PatientRow::into_profile).collect();
        cohort.hcps = self.rows::<HcpRow>(HCPS)?.into_iter().map(HcpRow::into_profile).collect();
        cohort.measurements = self
            .rows::<MeasurementRow>(MEASUREMENTS)?
            .into_iter()
            .map(|row| Measurement::try_from(row).map_err(|e| DatasetError::format("measurements", e)))
            .collect::<Result<_, _>>()?;
        cohort.alerts = self
            .rows::<AlertRow>(ALERTS)?
            .into_iter()
            .map(|row| row.into_alert().map_err(|e| DatasetError::format("alerts", e)))
            .collect::<Result<_, _>>()?;
        cohort.responses = self.rows::<ResponseRow>(RESPONSES)?.into_iter().map(Into::into).collect();
        cohort.medication_changes =
            self.rows::<MedicationChangeRow>(MEDICATION_CHANGES)?.into_iter().map(Into::into).collect();
        cohort.admissions = self.rows::<AdmissionRow>(ADMISSIONS)?.into_iter().map(Into::into).collect();
        cohort.consultations = self.rows::<ConsultationRow>(CONSULTATIONS)?.into_iter().map(Into::into).collect();
        let ledger = self.get(TRUTH_LEDGER).ok_or_else(|| DatasetError::format("truth_ledger", "file is missing"))?;
        cohort.truth_ledger = serde_json::from_slice(ledger).map_err(|e| DatasetError::format("truth_ledger", e))?;

        cohort.patients.sort_by_key(|p| p.id);
        cohort.hcps.sort_by_key(|h| h.id);
        cohort.measurements.sort_by_key(|m| m.id);
        cohort.alerts.sort_by_key(|a| a.id);
        cohort.responses.sort_by_key(|r| r.id);
        cohort.medication_changes.sort_by_key(|m| m.id);
        cohort.admissions.sort_by_key(|a| a.id);
        cohort.consultations.sort_by_key(|c| c.id);

        let report = validate_cohort(&cohort);
        if !report.is_empty() {
            return Err(DatasetError::Validation(report));
        }
        for (name, expected) in &manifest.row_counts {
            let actual = match name.as_str() {
                PATIENTS => cohort.patients.len(),
                HCPS => cohort.hcps.len(),
                MEASUREMENTS => cohort.measurements.len(),
                ALERTS => cohort.alerts.len(),
                RESPONSES => cohort.responses.len(),
                MEDICATION_CHANGES => cohort.medication_changes.len(),
                ADMISSIONS => cohort.admissions.len(),
                CONSULTATIONS => cohort.consultations.len(),
                TRUTH_LEDGER => cohort.truth_ledger.len(),
                other => return Err(DatasetError::format("manifest", format!("unknown file {other} in row_counts"))),
            };
            if actual != *expected {
                return Err(DatasetError::format(
                    "manifest",
                    format!("{name} has {actual} rows but the manifest says {expected}"),
                ));
            }
        }

        Ok(cohort)
    }

    fn rows<T: DeserializeOwned>(&self, file: &str) -> Result<Vec<T>, DatasetError> {
        let stem = file.trim_end_matches(".csv");
        let bytes = self.get(file).ok_or_else(|| DatasetError::format(stem, "file is missing"))?;
        let mut reader = csv::ReaderBuilder::new().from_reader(bytes);
        reader
            .deserialize()
            .enumerate()
            .map(|(i, row)| row.map_err(|e| DatasetError::format(stem, format!("row {}: {e}", i + 1))))
            .collect()
    }
}

/// Renders a valid cohort into bundle files.
pub fn render(cohort: &Cohort) -> Result<Bundle, DatasetError> {
    let report = validate_cohort(cohort);
    if !report.is_empty() {
        return Err(DatasetError::Validation(report));
    }
    let mut files = BTreeMap::new();
    let mut row_counts = BTreeMap::new();
    let mut put = |name: &str, bytes: Vec<u8>, rows: usize| {
        files.insert(name.to_owned(), bytes);
        row_counts.insert(name.to_owned(), rows);
    };

    let mut patients: Vec<_> = cohort.patients.iter().collect();
    patients.sort_by_key(|p| p.id);
    put(PATIENTS, csv_bytes(PATIENT_COLUMNS, patients.iter().map(|p| PatientRow::from(*p))), patients.len());

    let mut hcps: Vec<_> = cohort.hcps.iter().collect();
    hcps.sort_by_key(|h| h.id);
    put(HCPS, csv_bytes(HCP_COLUMNS, hcps.iter().map(|h| HcpRow::from(*h))), hcps.len());

    let mut measurements: Vec<_> = cohort.measurements.iter().collect();
    measurements.sort_by_key(|m| (m.timestamp, m.id));
    put(
        MEASUREMENTS,
        csv_bytes(MEASUREMENT_COLUMNS, measurements.iter().map(|m| MeasurementRow::from(*m))),
        measurements.len(),
    );

    let mut alerts: Vec<_> = cohort.alerts.iter().collect();
    alerts.sort_by_key(|a| (a.created_at, a.id));
    put(ALERTS, csv_bytes(ALERT_COLUMNS, alerts.iter().map(|a| AlertRow::from(*a))), alerts.len());

    let mut responses: Vec<_> = cohort.responses.iter().collect();
    responses.sort_by_key(|r| (r.timestamp, r.id));
    put(RESPONSES, csv_bytes(RESPONSE_COLUMNS, responses.iter().map(|r| ResponseRow::from(*r))), responses.len());

    let mut changes: Vec<_> = cohort.medication_changes.iter().collect();
    changes.sort_by_key(|m| (m.timestamp, m.id));
    put(
        MEDICATION_CHANGES,
        csv_bytes(MEDICATION_CHANGE_COLUMNS, changes.iter().map(|m| MedicationChangeRow::from(*m))),
        changes.len(),
    );

    let mut admissions: Vec<_> = cohort.admissions.iter().collect();
    admissions.sort_by_key(|a| (a.start, a.id));
    put(ADMISSIONS, csv_bytes(ADMISSION_COLUMNS, admissions.iter().map(|a| AdmissionRow::from(*a))), admissions.len());

    let mut consultations: Vec<_> = cohort.consultations.iter().collect();
    consultations.sort_by_key(|c| (c.timestamp, c.id));
    put(
        CONSULTATIONS,
        csv_bytes(CONSULTATION_COLUMNS, consultations.iter().map(|c| ConsultationRow::from(*c))),
        consultations.len(),
    );

    put(TRUTH_LEDGER, json_bytes(&cohort.truth_ledger), cohort.truth_ledger.len());

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        seed: cohort.config.seed,
        days_simulated: cohort.days_simulated,
        config: cohort.config.clone(),
        row_counts,
        truth_ledger_note: LEDGER_NOTE.to_owned(),
    };
    files.insert(MANIFEST.to_owned(), json_bytes(&manifest));
    Ok(Bundle { files })
}

/// Writes a cohort as a bundle into the existing directory `dir`.
pub fn export(cohort: &Cohort, dir: &Path) -> Result<Manifest, DatasetError> {
    let bundle = render(cohort)?;
    bundle.write_to(dir)?;
    bundle.manifest()
}

/// Reads and validates the bundle in `dir`.
pub fn import(dir: &Path) -> Result<Cohort, DatasetError> {
    Bundle::read_from(dir)?.parse()
}

fn csv_bytes<T: Serialize>(columns: &[&str], rows: impl Iterator<Item = T>) -> Vec<u8> {
    let mut writer =
        csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).has_headers(false).from_writer(Vec::new());
    writer.write_record(columns).expect("writing to memory cannot fail");
    for row in rows {
        writer.serialize(row).expect("writing to memory cannot fail");
    }
    writer.into_inner().expect("writing to memory cannot fail")
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.write_all(b"\n").expect("writing to memory cannot fail");
    out
}

const HCP_COLUMNS: &[&str] = &["hcp_id", "display_name", "role", "experience", "confidence", "doc_style", "duty_days"];
const MEASUREMENT_COLUMNS: &[&str] =
    &["measurement_id", "patient_id", "timestamp", "vital", "value", "unit", "comment"];
const ALERT_COLUMNS: &[&str] =
    &["alert_id", "patient_id", "measurement_id", "created_at", "rules", "severity", "status", "assigned_hcp_id"];
const RESPONSE_COLUMNS: &[&str] = &["response_id", "alert_id", "hcp_id", "timestamp", "action", "note"];
const MEDICATION_CHANGE_COLUMNS: &[&str] = &[
    "medication_change_id",
    "patient_id",
    "timestamp",
    "drug",
    "change",
    "effect_vital",
    "effect_direction",
    "effect_magnitude",
    "onset_days",
];
const ADMISSION_COLUMNS: &[&str] = &["admission_id", "patient_id", "start", "end", "reason"];
const CONSULTATION_COLUMNS: &[&str] = &["consultation_id", "patient_id", "hcp_id", "timestamp", "channel", "text"];

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

#[derive(Serialize, Deserialize)]
struct PatientRow {
    patient_id: PatientId,
    display_name: String,
    age: u32,
    comorbidities: String,
    stability_class: StabilityClass,
    adherence: f64,
    home_support: HomeSupport,
    enrollment_date: NaiveDate,
    baseline_weight: f64,
    baseline_systolic_bp: f64,
    baseline_diastolic_bp: f64,
    baseline_heart_rate: f64,
    low_weight: f64,
    high_weight: f64,
    low_systolic_bp: f64,
    high_systolic_bp: f64,
    low_diastolic_bp: f64,
    high_diastolic_bp: f64,
    low_heart_rate: f64,
    high_heart_rate: f64,
}

impl From<&PatientProfile> for PatientRow {
    fn from(p: &PatientProfile) -> Self {
        let t = &p.thresholds;
        PatientRow {
            patient_id: p.id,
            display_name: p.display_name.clone(),
            age: p.age,
            comorbidities: join(&p.comorbidities),
            stability_class: p.stability_class,
            adherence: p.adherence,
            home_support: p.home_support,
            enrollment_date: p.enrollment_date,
            baseline_weight: p.baselines.weight,
            baseline_systolic_bp: p.baselines.systolic_bp,
            baseline_diastolic_bp: p.baselines.diastolic_bp,
            baseline_heart_rate: p.baselines.heart_rate,
            low_weight: t.weight.low,
            high_weight: t.weight.high,
            low_systolic_bp: t.systolic_bp.low,
            high_systolic_bp: t.systolic_bp.high,
            low_diastolic_bp: t.diastolic_bp.low,
            high_diastolic_bp: t.diastolic_bp.high,
            low_heart_rate: t.heart_rate.low,
            high_heart_rate: t.heart_rate.high,
        }
    }
}

impl PatientRow {
    fn into_profile(self) -> PatientProfile {
        PatientProfile {
            id: self.patient_id,
            display_name: self.display_name,
            age: self.age,
            comorbidities: self
                .comorbidities
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect::<BTreeSet<_>>(),
            stability_class: self.stability_class,
            adherence: self.adherence,
            home_support: self.home_support,
            enrollment_date: self.enrollment_date,
            baselines: VitalMap {
                weight: self.baseline_weight,
                systolic_bp: self.baseline_systolic_bp,
                diastolic_bp: self.baseline_diastolic_bp,
                heart_rate: self.baseline_heart_rate,
            },
            thresholds: VitalMap {
                weight: Threshold::new(self.low_weight, self.high_weight),
                systolic_bp: Threshold::new(self.low_systolic_bp, self.high_systolic_bp),
                diastolic_bp: Threshold::new(self.low_diastolic_bp, self.high_diastolic_bp),
                heart_rate: Threshold::new(self.low_heart_rate, self.high_heart_rate),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HcpRow {
    hcp_id: HcpId,
    display_name: String,
    role: HcpRole,
    experience: Experience,
    confidence: f64,
    doc_style: DocStyle,
    duty_days: DutyDays,
}

impl From<&HcpProfile> for HcpRow {
    fn from(h: &HcpProfile) -> Self {
        HcpRow {
            hcp_id: h.id,
            display_name: h.display_name.clone(),
            role: h.role,
            experience: h.experience,
            confidence: h.confidence,
            doc_style: h.doc_style,
            duty_days: h.duty_days,
        }
    }
}

impl HcpRow {
    fn into_profile(self) -> HcpProfile {
        HcpProfile {
            id: self.hcp_id,
            display_name: self.display_name,
            role: self.role,
            experience: self.experience,
            confidence: self.confidence,
            doc_style: self.doc_style,
            duty_days: self.duty_days,
        }
    }
}

/// Values are written with the vital's fixed precision.
#[derive(Serialize, Deserialize)]
struct MeasurementRow {
    measurement_id: MeasurementId,
    patient_id: PatientId,
    #[serde(with = "utc")]
    timestamp: NaiveDateTime,
    vital: Vital,
    value: String,
    unit: String,
    comment: Option<String>,
}

impl From<&Measurement> for MeasurementRow {
    fn from(m: &Measurement) -> Self {
        MeasurementRow {
            measurement_id: m.id,
            patient_id: m.patient_id,
            timestamp: m.timestamp,
            vital: m.vital,
            value: m.vital.format_value(m.value),
            unit: m.vital.unit().to_owned(),
            comment: m.comment.clone(),
        }
    }
}

impl TryFrom<MeasurementRow> for Measurement {
    type Error = std::num::ParseFloatError;

    fn try_from(row: MeasurementRow) -> Result<Self, Self::Error> {
        Ok(Measurement {
            id: row.measurement_id,
            patient_id: row.patient_id,
            timestamp: row.timestamp,
            vital: row.vital,
            value: row.value.parse()?,
            comment: row.comment,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct AlertRow {
    alert_id: AlertId,
    patient_id: PatientId,
    measurement_id: MeasurementId,
    #[serde(with = "utc")]
    created_at: NaiveDateTime,
    rules: String,
    severity: Severity,
    status: AlertStatus,
    assigned_hcp_id: Option<HcpId>,
}

impl From<&Alert> for AlertRow {
    fn from(a: &Alert) -> Self {
        AlertRow {
            alert_id: a.id,
            patient_id: a.patient_id,
            measurement_id: a.measurement_id,
            created_at: a.created_at,
            rules: format_rules(&a.rules),
            severity: a.severity,
            status: a.status,
            assigned_hcp_id: a.assigned_hcp_id,
        }
    }
}

impl AlertRow {
    fn into_alert(self) -> Result<Alert, crate::domain::ParseEnumError> {
        let rules: BTreeSet<AlertRule> = parse_rules(&self.rules)?;
        Ok(Alert {
            id: self.alert_id,
            patient_id: self.patient_id,
            measurement_id: self.measurement_id,
            rules,
            severity: self.severity,
            created_at: self.created_at,
            status: self.status,
            assigned_hcp_id: self.assigned_hcp_id,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ResponseRow {
    response_id: ResponseId,
    alert_id: AlertId,
    hcp_id: HcpId,
    #[serde(with = "utc")]
    timestamp: NaiveDateTime,
    action: ResponseAction,
    note: String,
}

impl From<&AlertResponse> for ResponseRow {
    fn from(r: &AlertResponse) -> Self {
        ResponseRow {
            response_id: r.id,
            alert_id: r.alert_id,
            hcp_id: r.hcp_id,
            timestamp: r.timestamp,
            action: r.action,
            note: r.note.clone(),
        }
    }
}

impl From<ResponseRow> for AlertResponse {
    fn from(r: ResponseRow) -> Self {
        AlertResponse {
            id: r.response_id,
            alert_id: r.alert_id,
            hcp_id: r.hcp_id,
            action: r.action,
            note: r.note,
            timestamp: r.timestamp,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MedicationChangeRow {
    medication_change_id: MedicationChangeId,
    patient_id: PatientId,
    #[serde(with = "utc")]
    timestamp: NaiveDateTime,
    drug: String,
    change: MedicationChangeKind,
    effect_vital: Vital,
    effect_direction: Direction,
    effect_magnitude: f64,
    onset_days: u32,
}

impl From<&MedicationChange> for MedicationChangeRow {
    fn from(m: &MedicationChange) -> Self {
        MedicationChangeRow {
            medication_change_id: m.id,
            patient_id: m.patient_id,
            timestamp: m.timestamp,
            drug: m.drug.clone(),
            change: m.change,
            effect_vital: m.effect.vital,
            effect_direction: m.effect.direction,
            effect_magnitude: m.effect.magnitude,
            onset_days: m.effect.onset_days,
        }
    }
}

impl From<MedicationChangeRow> for MedicationChange {
    fn from(r: MedicationChangeRow) -> Self {
        MedicationChange {
            id: r.medication_change_id,
            patient_id: r.patient_id,
            drug: r.drug,
            change: r.change,
            timestamp: r.timestamp,
            effect: MedicationEffect {
                vital: r.effect_vital,
                direction: r.effect_direction,
                magnitude: r.effect_magnitude,
                onset_days: r.onset_days,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AdmissionRow {
    admission_id: AdmissionId,
    patient_id: PatientId,
    start: NaiveDate,
    end: NaiveDate,
    reason: String,
}

impl From<&Admission> for AdmissionRow {
    fn from(a: &Admission) -> Self {
        AdmissionRow {
            admission_id: a.id,
            patient_id: a.patient_id,
            start: a.start,
            end: a.end,
            reason: a.reason.clone(),
        }
    }
}

impl From<AdmissionRow> for Admission {
    fn from(r: AdmissionRow) -> Self {
        Admission { id: r.admission_id, patient_id: r.patient_id, start: r.start, end: r.end, reason: r.reason }
    }
}

#[derive(Serialize, Deserialize)]
struct ConsultationRow {
    consultation_id: ConsultationId,
    patient_id: PatientId,
    hcp_id: HcpId,
    #[serde(with = "utc")]
    timestamp: NaiveDateTime,
    channel: Channel,
    text: String,
}

impl From<&Consultation> for ConsultationRow {
    fn from(c: &Consultation) -> Self {
        ConsultationRow {
            consultation_id: c.id,
            patient_id: c.patient_id,
            hcp_id: c.hcp_id,
            timestamp: c.timestamp,
            channel: c.channel,
            text: c.text.clone(),
        }
    }
}

impl From<ConsultationRow> for Consultation {
    fn from(r: ConsultationRow) -> Self {
        Consultation {
            id: r.consultation_id,
            patient_id: r.patient_id,
            hcp_id: r.hcp_id,
            timestamp: r.timestamp,
            channel: r.channel,
            text: r.text,
        }
    }
}
