//! The six-entity RPM model: patients, HCPs, measurements, alerts (with the
//! responses that close them), medication changes and admissions, plus the
//! consultations HCPs write along the way.
//!
//! Everything here is plain data. Cross-entity rules are checked by
//! [`validate_cohort`] and histories are assembled by [`patient_timeline`].

mod ids;
mod timeline;
mod validate;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Weekday};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::SimulationConfig;

pub use ids::*;
pub use timeline::{patient_timeline, TimelineError, TimelineEvent, TimelineItem};
pub use validate::{validate_cohort, EntityKind, ValidationReport, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} `{text}`")]
pub struct ParseEnumError {
    pub kind: &'static str,
    pub text: String,
}

/// Declares a fieldless enum with a fixed snake_case wire name per variant.
macro_rules! wire_enum {
    ($(#[$meta:meta])* $name:ident, $kind:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.pad(self.as_str())
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = $crate::domain::ParseEnumError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err($crate::domain::ParseEnumError { kind: $kind, text: s.to_owned() }),
                }
            }
        }

        impl ::serde::Serialize for $name {
            fn serialize<S: ::serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> ::serde::Deserialize<'de> for $name {
            fn deserialize<D: ::serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let text = <String as ::serde::Deserialize>::deserialize(deserializer)?;
                text.parse().map_err(::serde::de::Error::custom)
            }
        }
    };
}
pub(crate) use wire_enum;

wire_enum!(
    /// The four monitored vital signs. Blood pressure is split into its two
    /// components because each carries its own thresholds.
    Vital, "vital" {
        Weight => "weight",
        SystolicBp => "systolic_bp",
        DiastolicBp => "diastolic_bp",
        HeartRate => "heart_rate",
    }
);

impl Vital {
    pub fn unit(self) -> &'static str {
        match self {
            Vital::Weight => "kg",
            Vital::SystolicBp | Vital::DiastolicBp => "mmHg",
            Vital::HeartRate => "bpm",
        }
    }

    /// Decimal places used when values are recorded and exported.
    pub fn decimals(self) -> usize {
        match self {
            Vital::Weight => 1,
            _ => 0,
        }
    }

    /// Human-readable name used in notes and comments.
    pub fn label(self) -> &'static str {
        match self {
            Vital::Weight => "weight",
            Vital::SystolicBp => "systolic BP",
            Vital::DiastolicBp => "diastolic BP",
            Vital::HeartRate => "heart rate",
        }
    }

    /// Rounds a raw value to the recorded precision of this vital.
    pub fn quantize(self, value: f64) -> f64 {
        match self.decimals() {
            0 => value.round(),
            _ => (value * 10.0).round() / 10.0,
        }
    }

    /// Formats a value with the recorded precision of this vital.
    pub fn format_value(self, value: f64) -> String {
        format!("{:.*}", self.decimals(), value)
    }

    /// Smallest positive recordable value.
    pub fn floor(self) -> f64 {
        match self.decimals() {
            0 => 1.0,
            _ => 0.1,
        }
    }
}

/// One value per vital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VitalMap<T> {
    pub weight: T,
    pub systolic_bp: T,
    pub diastolic_bp: T,
    pub heart_rate: T,
}

impl<T> VitalMap<T> {
    pub fn from_fn(mut f: impl FnMut(Vital) -> T) -> Self {
        VitalMap {
            weight: f(Vital::Weight),
            systolic_bp: f(Vital::SystolicBp),
            diastolic_bp: f(Vital::DiastolicBp),
            heart_rate: f(Vital::HeartRate),
        }
    }

    pub fn get(&self, vital: Vital) -> &T {
        match vital {
            Vital::Weight => &self.weight,
            Vital::SystolicBp => &self.systolic_bp,
            Vital::DiastolicBp => &self.diastolic_bp,
            Vital::HeartRate => &self.heart_rate,
        }
    }

    pub fn get_mut(&mut self, vital: Vital) -> &mut T {
        match vital {
            Vital::Weight => &mut self.weight,
            Vital::SystolicBp => &mut self.systolic_bp,
            Vital::DiastolicBp => &mut self.diastolic_bp,
            Vital::HeartRate => &mut self.heart_rate,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vital, &T)> {
        Vital::ALL.iter().map(move |&v| (v, self.get(v)))
    }

    pub fn map<U>(&self, mut f: impl FnMut(Vital, &T) -> U) -> VitalMap<U> {
        VitalMap::from_fn(|v| f(v, self.get(v)))
    }
}

/// Patient-specific alert limits for one vital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub low: f64,
    pub high: f64,
}

impl Threshold {
    pub fn new(low: f64, high: f64) -> Self {
        Threshold { low, high }
    }

    /// True when `value` lies strictly outside `(low, high)`.
    pub fn breached_by(&self, value: f64) -> bool {
        value < self.low || value > self.high
    }
}

wire_enum!(StabilityClass, "stability class" {
    Stable => "stable",
    Fluctuating => "fluctuating",
    Spiky => "spiky",
});

wire_enum!(HomeSupport, "home support" {
    High => "high",
    Low => "low",
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientProfile {
    pub id: PatientId,
    pub display_name: String,
    pub age: u32,
    pub comorbidities: BTreeSet<String>,
    pub stability_class: StabilityClass,
    /// Daily submission probability.
    pub adherence: f64,
    pub home_support: HomeSupport,
    pub enrollment_date: NaiveDate,
    pub baselines: VitalMap<f64>,
    pub thresholds: VitalMap<Threshold>,
}

wire_enum!(HcpRole, "hcp role" {
    Nurse => "nurse",
    Physician => "physician",
});

wire_enum!(Experience, "experience" {
    Novice => "novice",
    Experienced => "experienced",
});

wire_enum!(DocStyle, "documentation style" {
    Terse => "terse",
    Verbose => "verbose",
});

/// A set of weekdays, stored as a Monday-first bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DutyDays(u8);

impl DutyDays {
    pub const WEEKDAYS: DutyDays = DutyDays(0b0001_1111);
    pub const EVERY_DAY: DutyDays = DutyDays(0b0111_1111);

    pub fn empty() -> Self {
        DutyDays(0)
    }

    pub fn from_days(days: impl IntoIterator<Item = Weekday>) -> Self {
        let mut set = DutyDays::empty();
        for day in days {
            set.insert(day);
        }
        set
    }

    pub fn insert(&mut self, day: Weekday) {
        self.0 |= 1 << day.num_days_from_monday();
    }

    pub fn contains(&self, day: Weekday) -> bool {
        self.0 & (1 << day.num_days_from_monday()) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 & 0x7f == 0
    }

    pub fn len(&self) -> usize {
        (self.0 & 0x7f).count_ones() as usize
    }

    pub fn covers(&self, date: NaiveDate) -> bool {
        self.contains(date.weekday())
    }

    pub fn iter(&self) -> impl Iterator<Item = Weekday> + '_ {
        (0..7u8).filter(move |bit| self.0 & (1 << bit) != 0).filter_map(|bit| Weekday::try_from(bit).ok())
    }
}

impl fmt::Display for DutyDays {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.iter().map(|d| d.to_string()).collect();
        f.write_str(&names.join(";"))
    }
}

impl FromStr for DutyDays {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = DutyDays::empty();
        for part in s.split(';').filter(|p| !p.is_empty()) {
            let day: Weekday = part.parse().map_err(|_| ParseEnumError { kind: "weekday", text: part.to_owned() })?;
            set.insert(day);
        }
        Ok(set)
    }
}

impl Serialize for DutyDays {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DutyDays {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HcpProfile {
    pub id: HcpId,
    pub display_name: String,
    pub role: HcpRole,
    pub experience: Experience,
    pub confidence: f64,
    pub doc_style: DocStyle,
    pub duty_days: DutyDays,
}

impl HcpProfile {
    pub fn on_duty(&self, date: NaiveDate) -> bool {
        self.duty_days.covers(date)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub id: MeasurementId,
    pub patient_id: PatientId,
    #[serde(with = "utc")]
    pub timestamp: NaiveDateTime,
    pub vital: Vital,
    pub value: f64,
    pub comment: Option<String>,
}

impl Measurement {
    pub fn unit(&self) -> &'static str {
        self.vital.unit()
    }
}

wire_enum!(AlertRule, "alert rule" {
    ThresholdLow => "threshold_low",
    ThresholdHigh => "threshold_high",
    AbruptChange => "abrupt_change",
});

impl AlertRule {
    pub fn is_threshold(self) -> bool {
        matches!(self, AlertRule::ThresholdLow | AlertRule::ThresholdHigh)
    }
}

/// Rendered as `threshold_high;abrupt_change` in exported tables.
pub fn format_rules(rules: &BTreeSet<AlertRule>) -> String {
    rules.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(";")
}

pub fn parse_rules(text: &str) -> Result<BTreeSet<AlertRule>, ParseEnumError> {
    text.split(';').filter(|p| !p.is_empty()).map(str::parse).collect()
}

wire_enum!(Severity, "severity" {
    Mild => "mild",
    High => "high",
});

wire_enum!(AlertStatus, "alert status" {
    Open => "open",
    Resolved => "resolved",
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alert {
    pub id: AlertId,
    pub patient_id: PatientId,
    pub measurement_id: MeasurementId,
    pub rules: BTreeSet<AlertRule>,
    pub severity: Severity,
    #[serde(with = "utc")]
    pub created_at: NaiveDateTime,
    pub status: AlertStatus,
    pub assigned_hcp_id: Option<HcpId>,
}

impl Alert {
    pub fn is_open(&self) -> bool {
        self.status == AlertStatus::Open
    }

    pub fn has_threshold_rule(&self) -> bool {
        self.rules.iter().any(|r| r.is_threshold())
    }
}

wire_enum!(ResponseAction, "response action" {
    CallPatient => "call_patient",
    AdjustMedication => "adjust_medication",
    ContactColleague => "contact_colleague",
    Dismiss => "dismiss",
});

impl ResponseAction {
    /// Every action except `contact_colleague` closes the alert.
    pub fn is_terminal(self) -> bool {
        self != ResponseAction::ContactColleague
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertResponse {
    pub id: ResponseId,
    pub alert_id: AlertId,
    pub hcp_id: HcpId,
    pub action: ResponseAction,
    pub note: String,
    #[serde(with = "utc")]
    pub timestamp: NaiveDateTime,
}

wire_enum!(MedicationChangeKind, "medication change" {
    Start => "start",
    Stop => "stop",
    Increase => "increase",
    Decrease => "decrease",
});

wire_enum!(Direction, "direction" {
    Up => "up",
    Down => "down",
});

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }
}

/// How a medication change moves one vital: linearly towards
/// `direction × magnitude` over `onset_days`, then held.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedicationEffect {
    pub vital: Vital,
    pub direction: Direction,
    pub magnitude: f64,
    pub onset_days: u32,
}

impl MedicationEffect {
    /// Signed contribution `elapsed_days` after the change took place.
    pub fn contribution(&self, elapsed_days: i64) -> f64 {
        if elapsed_days <= 0 {
            return 0.0;
        }
        let ramp = (elapsed_days as f64 / self.onset_days.max(1) as f64).min(1.0);
        self.direction.sign() * self.magnitude * ramp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedicationChange {
    pub id: MedicationChangeId,
    pub patient_id: PatientId,
    pub drug: String,
    pub change: MedicationChangeKind,
    #[serde(with = "utc")]
    pub timestamp: NaiveDateTime,
    pub effect: MedicationEffect,
}

/// A hospital stay covering the dates `start..end` (discharged on `end`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admission {
    pub id: AdmissionId,
    pub patient_id: PatientId,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub reason: String,
}

impl Admission {
    pub fn covers(&self, date: NaiveDate) -> bool {
        self.start <= date && date < self.end
    }

    pub fn covers_instant(&self, at: NaiveDateTime) -> bool {
        self.covers(at.date())
    }

    pub fn length_days(&self) -> i64 {
        (self.end - self.start).num_days()
    }
}

wire_enum!(Channel, "consultation channel" {
    Phone => "phone",
    InPerson => "in_person",
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consultation {
    pub id: ConsultationId,
    pub patient_id: PatientId,
    pub hcp_id: HcpId,
    #[serde(with = "utc")]
    pub timestamp: NaiveDateTime,
    pub channel: Channel,
    pub text: String,
}

wire_enum!(LedgerKind, "ledger kind" {
    InjectedDuplicate => "injected_duplicate",
    InjectedIrrelevantComment => "injected_irrelevant_comment",
});

/// Provenance of one injected defect. Not part of the simulated world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLedgerEntry {
    pub kind: LedgerKind,
    pub original_id: Option<MeasurementId>,
    pub injected_id: MeasurementId,
}

/// Position of `id` in a collection normally kept in ascending id order;
/// falls back to a linear scan when that order has been disturbed.
fn lookup<T, I: Ord + Copy>(items: &[T], id: I, key: impl Fn(&T) -> I) -> Option<usize> {
    match items.binary_search_by_key(&id, &key) {
        Ok(i) => Some(i),
        Err(_) => items.iter().position(|item| key(item) == id),
    }
}

/// One complete simulated world.
///
/// Every collection is kept in ascending id order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub config: SimulationConfig,
    pub patients: Vec<PatientProfile>,
    pub hcps: Vec<HcpProfile>,
    pub measurements: Vec<Measurement>,
    pub alerts: Vec<Alert>,
    pub responses: Vec<AlertResponse>,
    pub medication_changes: Vec<MedicationChange>,
    pub admissions: Vec<Admission>,
    pub consultations: Vec<Consultation>,
    pub truth_ledger: Vec<TruthLedgerEntry>,
    /// Number of simulated days so far; the clock is the last of them.
    pub days_simulated: u32,
}

impl Cohort {
    pub fn empty(config: SimulationConfig) -> Self {
        Cohort {
            config,
            patients: Vec::new(),
            hcps: Vec::new(),
            measurements: Vec::new(),
            alerts: Vec::new(),
            responses: Vec::new(),
            medication_changes: Vec::new(),
            admissions: Vec::new(),
            consultations: Vec::new(),
            truth_ledger: Vec::new(),
            days_simulated: 0,
        }
    }

    /// Date of simulation day `day` (0-based).
    pub fn date_of_day(&self, day: u32) -> NaiveDate {
        self.config.start_date + Duration::days(i64::from(day))
    }

    /// Last simulated date, if any day has run.
    pub fn clock(&self) -> Option<NaiveDate> {
        self.days_simulated.checked_sub(1).map(|day| self.date_of_day(day))
    }

    pub fn is_complete(&self) -> bool {
        self.days_simulated >= self.config.duration_days
    }

    pub fn patient(&self, id: PatientId) -> Option<&PatientProfile> {
        self.patients.iter().find(|p| p.id == id)
    }

    pub fn hcp(&self, id: HcpId) -> Option<&HcpProfile> {
        self.hcps.iter().find(|h| h.id == id)
    }

    pub fn measurement(&self, id: MeasurementId) -> Option<&Measurement> {
        lookup(&self.measurements, id, |m| m.id).map(|i| &self.measurements[i])
    }

    pub fn alert(&self, id: AlertId) -> Option<&Alert> {
        lookup(&self.alerts, id, |a| a.id).map(|i| &self.alerts[i])
    }

    pub fn alert_mut(&mut self, id: AlertId) -> Option<&mut Alert> {
        lookup(&self.alerts, id, |a| a.id).map(|i| &mut self.alerts[i])
    }

    pub fn open_alert_count(&self) -> usize {
        self.alerts.iter().filter(|a| a.is_open()).count()
    }

    pub fn admitted_on(&self, patient: PatientId, date: NaiveDate) -> Option<&Admission> {
        self.admissions.iter().find(|a| a.patient_id == patient && a.covers(date))
    }

    /// Ids of measurements that were injected as duplicates.
    pub fn injected_measurement_ids(&self) -> BTreeSet<MeasurementId> {
        self.truth_ledger.iter().filter(|e| e.kind == LedgerKind::InjectedDuplicate).map(|e| e.injected_id).collect()
    }

    pub fn next_measurement_id(&self) -> MeasurementId {
        MeasurementId(self.measurements.iter().map(|m| m.id.0).max().unwrap_or(0) + 1)
    }

    pub fn next_alert_id(&self) -> AlertId {
        AlertId(self.alerts.iter().map(|a| a.id.0).max().unwrap_or(0) + 1)
    }

    pub fn next_response_id(&self) -> ResponseId {
        ResponseId(self.responses.iter().map(|r| r.id.0).max().unwrap_or(0) + 1)
    }

    pub fn next_medication_change_id(&self) -> MedicationChangeId {
        MedicationChangeId(self.medication_changes.iter().map(|m| m.id.0).max().unwrap_or(0) + 1)
    }

    pub fn next_admission_id(&self) -> AdmissionId {
        AdmissionId(self.admissions.iter().map(|a| a.id.0).max().unwrap_or(0) + 1)
    }

    pub fn next_consultation_id(&self) -> ConsultationId {
        ConsultationId(self.consultations.iter().map(|c| c.id.0).max().unwrap_or(0) + 1)
    }
}

/// Timestamps are naive but always mean UTC; on the wire they carry a `Z`.
pub mod utc {
    use chrono::NaiveDateTime;
    use serde::{Deserialize, Deserializer, Serializer};

    pub const FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

    pub fn format(at: &NaiveDateTime) -> String {
        at.format(FORMAT).to_string()
    }

    pub fn parse(text: &str) -> Result<NaiveDateTime, chrono::ParseError> {
        NaiveDateTime::parse_from_str(text, FORMAT)
    }

    pub fn serialize<S: Serializer>(at: &NaiveDateTime, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&at.format(FORMAT))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<NaiveDateTime, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use chrono::NaiveDateTime;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(at: &Option<NaiveDateTime>, serializer: S) -> Result<S::Ok, S::Error> {
            match at {
                Some(at) => serializer.collect_str(&at.format(super::FORMAT)),
                None => serializer.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<NaiveDateTime>, D::Error> {
            Option::<String>::deserialize(deserializer)?
                .map(|text| super::parse(&text).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}
