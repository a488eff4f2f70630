use std::collections::BTreeMap;

use serde::Serialize;

use super::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimelineError {
    #[error("patient {0} not found")]
    PatientNotFound(PatientId),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimelineEvent {
    Measurement(Measurement),
    Alert {
        #[serde(flatten)]
        alert: Alert,
        /// Responses recorded against this alert, oldest first.
        response_ids: Vec<ResponseId>,
    },
    Response(AlertResponse),
    MedicationChange(MedicationChange),
    Consultation(Consultation),
    Admission(Admission),
}

impl TimelineEvent {
    /// Tie-break rank for events sharing a timestamp.
    pub fn rank(&self) -> u8 {
        match self {
            TimelineEvent::Measurement(_) => 0,
            TimelineEvent::Alert { .. } => 1,
            TimelineEvent::Response(_) => 2,
            TimelineEvent::MedicationChange(_) => 3,
            TimelineEvent::Consultation(_) => 4,
            TimelineEvent::Admission(_) => 5,
        }
    }

    pub fn index(&self) -> u32 {
        match self {
            TimelineEvent::Measurement(m) => m.id.0,
            TimelineEvent::Alert { alert, .. } => alert.id.0,
            TimelineEvent::Response(r) => r.id.0,
            TimelineEvent::MedicationChange(m) => m.id.0,
            TimelineEvent::Consultation(c) => c.id.0,
            TimelineEvent::Admission(a) => a.id.0,
        }
    }

    pub fn timestamp(&self) -> NaiveDateTime {
        match self {
            TimelineEvent::Measurement(m) => m.timestamp,
            TimelineEvent::Alert { alert, .. } => alert.created_at,
            TimelineEvent::Response(r) => r.timestamp,
            TimelineEvent::MedicationChange(m) => m.timestamp,
            TimelineEvent::Consultation(c) => c.timestamp,
            TimelineEvent::Admission(a) => a.start.and_time(chrono::NaiveTime::MIN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineItem {
    #[serde(with = "utc")]
    pub timestamp: NaiveDateTime,
    #[serde(flatten)]
    pub event: TimelineEvent,
}

/// All events touching one patient, in a deterministic total order:
/// timestamp, then kind (measurement, alert, response, medication change,
/// consultation, admission), then id.
pub fn patient_timeline(cohort: &Cohort, patient_id: PatientId) -> Result<Vec<TimelineItem>, TimelineError> {
    if cohort.patient(patient_id).is_none() {
        return Err(TimelineError::PatientNotFound(patient_id));
    }

    let mut responses_by_alert: BTreeMap<AlertId, Vec<&AlertResponse>> = BTreeMap::new();
    for r in &cohort.responses {
        responses_by_alert.entry(r.alert_id).or_default().push(r);
    }
    let patient_alerts: BTreeMap<AlertId, &Alert> =
        cohort.alerts.iter().filter(|a| a.patient_id == patient_id).map(|a| (a.id, a)).collect();

    let mut events = Vec::new();
    events.extend(
        cohort.measurements.iter().filter(|m| m.patient_id == patient_id).cloned().map(TimelineEvent::Measurement),
    );
    for alert in patient_alerts.values() {
        let mut linked: Vec<&AlertResponse> = responses_by_alert.get(&alert.id).cloned().unwrap_or_default();
        linked.sort_by_key(|r| (r.timestamp, r.id));
        events.push(TimelineEvent::Alert {
            alert: (*alert).clone(),
            response_ids: linked.iter().map(|r| r.id).collect(),
        });
        events.extend(linked.into_iter().cloned().map(TimelineEvent::Response));
    }
    events.extend(
        cohort
            .medication_changes
            .iter()
            .filter(|m| m.patient_id == patient_id)
            .cloned()
            .map(TimelineEvent::MedicationChange),
    );
    events.extend(
        cohort.consultations.iter().filter(|c| c.patient_id == patient_id).cloned().map(TimelineEvent::Consultation),
    );
    events
        .extend(cohort.admissions.iter().filter(|a| a.patient_id == patient_id).cloned().map(TimelineEvent::Admission));

    let mut items: Vec<TimelineItem> =
        events.into_iter().map(|event| TimelineItem { timestamp: event.timestamp(), event }).collect();
    items.sort_by_key(|item| (item.timestamp, item.event.rank(), item.event.index()));
    Ok(items)
}
