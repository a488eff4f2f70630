//! Cohort-level statistics and per-patient summaries. Both are pure
//! projections of a [`Cohort`]; injected duplicate readings are ignored.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::domain::{utc, Channel, Cohort, HcpId, PatientId, ResponseAction, Vital};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortStats {
    pub measurement_count: usize,
    pub alert_count: usize,
    /// Alerts per measurement; zero when there are no measurements.
    pub alert_rate: f64,
    pub open_alert_count: usize,
    pub response_count: usize,
    pub responses_by_action: BTreeMap<ResponseAction, usize>,
    /// Every HCP on the roster appears, with zero when idle.
    pub responses_by_hcp: BTreeMap<HcpId, usize>,
    /// Every patient appears, with zero when alert-free.
    pub alerts_by_patient: BTreeMap<PatientId, usize>,
    pub medication_change_count: usize,
    pub admission_count: usize,
    pub admission_days: i64,
    pub consultation_count: usize,
}

pub fn cohort_stats(cohort: &Cohort) -> CohortStats {
    let injected = cohort.injected_measurement_ids();
    let measurement_count = cohort.measurements.iter().filter(|m| !injected.contains(&m.id)).count();
    let alert_count = cohort.alerts.len();

    let mut responses_by_action: BTreeMap<ResponseAction, usize> =
        ResponseAction::ALL.iter().map(|a| (*a, 0)).collect();
    let mut responses_by_hcp: BTreeMap<HcpId, usize> = cohort.hcps.iter().map(|h| (h.id, 0)).collect();
    for r in &cohort.responses {
        *responses_by_action.entry(r.action).or_default() += 1;
        *responses_by_hcp.entry(r.hcp_id).or_default() += 1;
    }
    let mut alerts_by_patient: BTreeMap<PatientId, usize> = cohort.patients.iter().map(|p| (p.id, 0)).collect();
    for a in &cohort.alerts {
        *alerts_by_patient.entry(a.patient_id).or_default() += 1;
    }

    CohortStats {
        measurement_count,
        alert_count,
        alert_rate: if measurement_count == 0 { 0.0 } else { alert_count as f64 / measurement_count as f64 },
        open_alert_count: cohort.open_alert_count(),
        response_count: cohort.responses.len(),
        responses_by_action,
        responses_by_hcp,
        alerts_by_patient,
        medication_change_count: cohort.medication_changes.len(),
        admission_count: cohort.admissions.len(),
        admission_days: cohort.admissions.iter().map(|a| a.length_days()).sum(),
        consultation_count: cohort.consultations.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Rising,
    Falling,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VitalSummary {
    pub vital: Vital,
    pub unit: &'static str,
    pub latest: Option<f64>,
    #[serde(with = "utc::option")]
    pub latest_at: Option<NaiveDateTime>,
    /// Direction over the seven days up to the latest reading; absent with
    /// fewer than two reading days.
    pub trend: Option<Trend>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LastContact {
    #[serde(with = "utc")]
    pub timestamp: NaiveDateTime,
    pub channel: Channel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatientSummary {
    pub patient_id: PatientId,
    pub display_name: String,
    pub vitals: Vec<VitalSummary>,
    pub open_alerts: usize,
    pub admissions: usize,
    pub medication_changes: usize,
    pub last_contact: Option<LastContact>,
}

/// Least-squares slope times six days, compared against half the vital's
/// abrupt-change delta.
fn trend(points: &[(f64, f64)], flat_band: f64) -> Option<Trend> {
    let first = points.first()?.0;
    if points.iter().all(|p| p.0 == first) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let change = sxy / sxx * 6.0;
    Some(if change > flat_band {
        Trend::Rising
    } else if change < -flat_band {
        Trend::Falling
    } else {
        Trend::Flat
    })
}

/// `None` for an unknown patient.
pub fn patient_summary(cohort: &Cohort, patient_id: PatientId) -> Option<PatientSummary> {
    let patient = cohort.patient(patient_id)?;
    let injected = cohort.injected_measurement_ids();
    let vitals = Vital::ALL
        .iter()
        .map(|&vital| {
            let readings: Vec<_> = cohort
                .measurements
                .iter()
                .filter(|m| m.patient_id == patient_id && m.vital == vital && !injected.contains(&m.id))
                .collect();
            let latest = readings.iter().max_by_key(|m| (m.timestamp, m.id));
            let trend = latest.and_then(|last| {
                let end: NaiveDate = last.timestamp.date();
                let start = end - Duration::days(6);
                let points: Vec<(f64, f64)> = readings
                    .iter()
                    .filter(|m| m.timestamp.date() >= start)
                    .map(|m| ((m.timestamp.date() - start).num_days() as f64, m.value))
                    .collect();
                trend(&points, cohort.config.abrupt_delta.get(vital) / 2.0)
            });
            VitalSummary {
                vital,
                unit: vital.unit(),
                latest: latest.map(|m| m.value),
                latest_at: latest.map(|m| m.timestamp),
                trend,
            }
        })
        .collect();

    let last_contact = cohort
        .consultations
        .iter()
        .filter(|c| c.patient_id == patient_id)
        .max_by_key(|c| (c.timestamp, c.id))
        .map(|c| LastContact { timestamp: c.timestamp, channel: c.channel });

    Some(PatientSummary {
        patient_id,
        display_name: patient.display_name.clone(),
        vitals,
        open_alerts: cohort.alerts.iter().filter(|a| a.patient_id == patient_id && a.is_open()).count(),
        admissions: cohort.admissions.iter().filter(|a| a.patient_id == patient_id).count(),
        medication_changes: cohort.medication_changes.iter().filter(|m| m.patient_id == patient_id).count(),
        last_contact,
    })
}
