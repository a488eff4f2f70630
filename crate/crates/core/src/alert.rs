//! Alert rules: patient-specific thresholds and abrupt change against a
//! trailing median.
//!
//! The trailing window holds one reading per calendar day (the latest of
//! that day) for the `abrupt_window_days` days before the reading's own day.
//! Repeated readings within a day therefore never shift the median, which
//! keeps injected duplicates from disturbing the alerts of other readings.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{Duration, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::config::SimulationConfig;
use crate::domain::{
    Alert, AlertId, AlertRule, AlertStatus, HcpId, Measurement, MeasurementId, PatientId, PatientProfile, Severity,
    Vital, VitalMap,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlertRuleParams {
    pub abrupt_delta: VitalMap<f64>,
    pub abrupt_window_days: u32,
    pub escalation_margin: VitalMap<f64>,
}

impl From<&SimulationConfig> for AlertRuleParams {
    fn from(config: &SimulationConfig) -> Self {
        AlertRuleParams {
            abrupt_delta: config.abrupt_delta,
            abrupt_window_days: config.abrupt_window_days,
            escalation_margin: config.escalation_margin,
        }
    }
}

/// An alert that has been raised but not yet given an id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlertDraft {
    pub patient_id: PatientId,
    pub measurement_id: MeasurementId,
    pub rules: BTreeSet<AlertRule>,
    pub severity: Severity,
    pub created_at: NaiveDateTime,
}

impl AlertDraft {
    pub fn into_alert(self, id: AlertId, assigned_hcp_id: Option<HcpId>) -> Alert {
        Alert {
            id,
            patient_id: self.patient_id,
            measurement_id: self.measurement_id,
            rules: self.rules,
            severity: self.severity,
            created_at: self.created_at,
            status: AlertStatus::Open,
            assigned_hcp_id,
        }
    }

    pub fn key(&self) -> AlertKey {
        AlertKey { patient_id: self.patient_id, measurement_id: self.measurement_id, rules: self.rules.clone() }
    }
}

/// Identity of an alert for set comparisons between alert sources.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AlertKey {
    pub patient_id: PatientId,
    pub measurement_id: MeasurementId,
    pub rules: BTreeSet<AlertRule>,
}

impl From<&Alert> for AlertKey {
    fn from(alert: &Alert) -> Self {
        AlertKey { patient_id: alert.patient_id, measurement_id: alert.measurement_id, rules: alert.rules.clone() }
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { (values[mid - 1] + values[mid]) / 2.0 })
}

/// Median of the daily values in the window preceding `day`.
pub fn trailing_median<'a>(
    day: NaiveDate,
    window_days: u32,
    history: impl IntoIterator<Item = &'a Measurement>,
) -> Option<f64> {
    let first = day - Duration::days(i64::from(window_days));
    let mut latest: BTreeMap<NaiveDate, (NaiveDateTime, MeasurementId, f64)> = BTreeMap::new();
    for m in history {
        let d = m.timestamp.date();
        if d < first || d >= day {
            continue;
        }
        let candidate = (m.timestamp, m.id, m.value);
        latest
            .entry(d)
            .and_modify(|cur| {
                if (candidate.0, candidate.1) > (cur.0, cur.1) {
                    *cur = candidate;
                }
            })
            .or_insert(candidate);
    }
    let mut values: Vec<f64> = latest.values().map(|v| v.2).collect();
    median(&mut values)
}

/// Applies the alert rules to one measurement.
///
/// `history` must only hold earlier readings of the same patient and vital.
pub fn evaluate<'a>(
    measurement: &Measurement,
    profile: &PatientProfile,
    history: impl IntoIterator<Item = &'a Measurement>,
    params: &AlertRuleParams,
) -> Option<AlertDraft> {
    let vital = measurement.vital;
    let value = measurement.value;
    let limits = profile.thresholds.get(vital);
    let margin = *params.escalation_margin.get(vital);
    let delta = *params.abrupt_delta.get(vital);

    let mut rules = BTreeSet::new();
    let mut high = false;

    if value > limits.high {
        rules.insert(AlertRule::ThresholdHigh);
        high |= value - limits.high >= margin;
    }
    if value < limits.low {
        rules.insert(AlertRule::ThresholdLow);
        high |= limits.low - value >= margin;
    }
    let day = measurement.timestamp.date();
    if let Some(reference) = trailing_median(day, params.abrupt_window_days, history) {
        let deviation = (value - reference).abs();
        if deviation > delta {
            rules.insert(AlertRule::AbruptChange);
            high |= deviation >= 2.0 * delta;
        }
    }

    if rules.is_empty() {
        return None;
    }
    Some(AlertDraft {
        patient_id: measurement.patient_id,
        measurement_id: measurement.id,
        rules,
        severity: if high { Severity::High } else { Severity::Mild },
        created_at: measurement.timestamp,
    })
}

/// Re-derives alerts from a measurement stream, ignoring `exclude`d rows.
///
/// Each reading is evaluated against the earlier readings of the same
/// patient and vital. The result is sorted by (patient, measurement).
pub fn scan(
    measurements: &[Measurement],
    profiles: &[PatientProfile],
    params: &AlertRuleParams,
    exclude: &BTreeSet<MeasurementId>,
) -> Vec<AlertDraft> {
    let by_id: HashMap<PatientId, &PatientProfile> = profiles.iter().map(|p| (p.id, p)).collect();
    let mut streams: BTreeMap<(PatientId, Vital), Vec<&Measurement>> = BTreeMap::new();
    for m in measurements.iter().filter(|m| !exclude.contains(&m.id)) {
        streams.entry((m.patient_id, m.vital)).or_default().push(m);
    }

    let mut out = Vec::new();
    for ((patient_id, _), mut stream) in streams {
        let Some(profile) = by_id.get(&patient_id) else {
            continue;
        };
        stream.sort_by_key(|m| (m.timestamp, m.id));
        for (i, m) in stream.iter().enumerate() {
            if let Some(draft) = evaluate(m, profile, stream[..i].iter().copied(), params) {
                out.push(draft);
            }
        }
    }
    out.sort_by_key(|d| (d.patient_id, d.measurement_id));
    out
}

/// Set of alert keys, convenient for oracle comparisons.
pub fn key_set<'a>(alerts: impl IntoIterator<Item = &'a Alert>) -> BTreeSet<AlertKey> {
    alerts.into_iter().map(AlertKey::from).collect()
}
