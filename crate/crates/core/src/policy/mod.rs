//! Scripted HCP behaviour: who gets an alert, what they do with it, and
//! the records each action leaves behind.

mod notes;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Weekday};
use serde::Serialize;

pub use notes::{render_note, NoteEvent, NoteSubject};

use crate::domain::{
    Alert, AlertId, AlertResponse, AlertRule, AlertStatus, Channel, Cohort, Consultation, ConsultationId, Direction,
    HcpId, HcpProfile, Measurement, MedicationChange, MedicationChangeId, MedicationChangeKind, MedicationEffect,
    ResponseAction, ResponseId, Severity, StabilityClass, Vital,
};

/// Round-robin pick among the HCPs on duty on `date`, keyed by alert id.
/// `None` when nobody is on duty; the alert then waits for a duty day.
pub fn assign(alert: &Alert, hcps: &[HcpProfile], date: NaiveDate) -> Option<HcpId> {
    let on_duty: Vec<&HcpProfile> = hcps.iter().filter(|h| h.on_duty(date)).collect();
    if on_duty.is_empty() {
        return None;
    }
    Some(on_duty[alert.id.0 as usize % on_duty.len()].id)
}

/// The next on-duty HCP after `current` in roster order, wrapping around.
/// Falls back to `current` when nobody else is on duty.
pub fn successor(current: HcpId, hcps: &[HcpProfile], date: NaiveDate) -> Option<HcpId> {
    let on_duty: Vec<&HcpProfile> = hcps.iter().filter(|h| h.on_duty(date)).collect();
    if on_duty.is_empty() {
        return None;
    }
    on_duty.iter().find(|h| h.id > current).or_else(|| on_duty.first()).map(|h| h.id)
}

/// Days from `date` to the next day on which anyone on the roster works.
pub fn days_until_next_duty(hcps: &[HcpProfile], date: NaiveDate) -> u32 {
    (1..=7).find(|&k| hcps.iter().any(|h| h.on_duty(date + Duration::days(k as i64)))).unwrap_or(7)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionContext {
    pub alert: Alert,
    /// Alerts on the same patient and vital in the past seven days,
    /// including this one.
    pub repeat_count: u32,
    pub weekday: Weekday,
    pub days_until_next_duty: u32,
    pub stability_class: StabilityClass,
    pub hcp: HcpProfile,
}

impl DecisionContext {
    /// Gathers the context for `hcp` deciding on `alert` on `date`.
    pub fn build(cohort: &Cohort, alert: &Alert, hcp: &HcpProfile, date: NaiveDate) -> Option<Self> {
        let vital = cohort.measurement(alert.measurement_id)?.vital;
        let patient = cohort.patient(alert.patient_id)?;
        let since = alert.created_at - Duration::days(7);
        let repeat_count = cohort
            .alerts
            .iter()
            .filter(|a| a.patient_id == alert.patient_id && a.created_at > since && a.created_at <= alert.created_at)
            .filter(|a| a.id == alert.id || cohort.measurement(a.measurement_id).is_some_and(|m| m.vital == vital))
            .count() as u32;
        Some(DecisionContext {
            alert: alert.clone(),
            repeat_count: repeat_count.max(1),
            weekday: date.weekday(),
            days_until_next_duty: days_until_next_duty(&cohort.hcps, date),
            stability_class: patient.stability_class,
            hcp: hcp.clone(),
        })
    }
}

/// Fixed-priority decision table; the first matching rule wins.
///
/// 1. threshold rule and at least three alerts this week: adjust medication
/// 2. high severity: call the patient
/// 3. novice with confidence below 0.5: contact a colleague
/// 4. Friday, mild, and at least two days until anyone is on duty: call
/// 5. otherwise dismiss
pub fn decide(ctx: &DecisionContext) -> ResponseAction {
    if ctx.alert.has_threshold_rule() && ctx.repeat_count >= 3 {
        ResponseAction::AdjustMedication
    } else if ctx.alert.severity == Severity::High {
        ResponseAction::CallPatient
    } else if ctx.hcp.experience == crate::domain::Experience::Novice && ctx.hcp.confidence < 0.5 {
        ResponseAction::ContactColleague
    } else if ctx.weekday == Weekday::Fri && ctx.days_until_next_duty >= 2 && ctx.alert.severity == Severity::Mild {
        ResponseAction::CallPatient
    } else {
        ResponseAction::Dismiss
    }
}

/// Drug and effect for a medication adjustment, keyed by the vital and the
/// direction it strayed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prescription {
    pub drug: &'static str,
    pub change: MedicationChangeKind,
    pub effect: MedicationEffect,
}

pub fn prescription(vital: Vital, strayed: Direction) -> Prescription {
    use Direction::{Down, Up};
    use MedicationChangeKind::{Decrease, Increase};
    let (drug, change, direction, magnitude, onset_days) = match (vital, strayed) {
        (Vital::Weight, Up) => ("loop diuretic", Increase, Down, 1.5, 3),
        (Vital::Weight, Down) => ("loop diuretic", Decrease, Up, 1.0, 3),
        (Vital::SystolicBp, Up) => ("ACE inhibitor", Increase, Down, 10.0, 7),
        (Vital::SystolicBp, Down) => ("ACE inhibitor", Decrease, Up, 8.0, 7),
        (Vital::DiastolicBp, Up) => ("ACE inhibitor", Increase, Down, 6.0, 7),
        (Vital::DiastolicBp, Down) => ("ACE inhibitor", Decrease, Up, 5.0, 7),
        (Vital::HeartRate, Up) => ("beta-blocker", Increase, Down, 8.0, 5),
        (Vital::HeartRate, Down) => ("beta-blocker", Decrease, Up, 6.0, 5),
    };
    Prescription { drug, change, effect: MedicationEffect { vital, direction, magnitude, onset_days } }
}

/// Which way the alerting reading strayed: the breached limit, or the side
/// of the baseline for abrupt-change-only alerts.
pub fn strayed_direction(alert: &Alert, measurement: &Measurement, baseline: f64) -> Direction {
    if alert.rules.contains(&AlertRule::ThresholdHigh) {
        Direction::Up
    } else if alert.rules.contains(&AlertRule::ThresholdLow) {
        Direction::Down
    } else if measurement.value >= baseline {
        Direction::Up
    } else {
        Direction::Down
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("{kind} {id} not found")]
    NotFound { kind: &'static str, id: String },
    #[error("alert {0} is already resolved")]
    AlreadyResolved(AlertId),
    #[error("response time {at} precedes alert {alert} created at {created}")]
    BeforeAlert { alert: AlertId, at: NaiveDateTime, created: NaiveDateTime },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRequest {
    pub alert_id: AlertId,
    pub hcp_id: HcpId,
    pub action: ResponseAction,
    pub timestamp: NaiveDateTime,
    /// Rendered in the HCP's style when absent.
    pub note: Option<String>,
}

/// Records created by one response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponseOutcome {
    pub response_id: ResponseId,
    pub consultation_id: Option<ConsultationId>,
    pub medication_change_id: Option<MedicationChangeId>,
    pub reassigned_to: Option<HcpId>,
}

/// Records an HCP's response to an open alert together with its side effects.
///
/// Dismiss, call and adjust resolve the alert; a call also logs a
/// consultation (in person when the patient is admitted, by phone
/// otherwise); an adjustment logs a medication change. Contacting a
/// colleague hands the alert to the next HCP on duty and leaves it open.
pub fn apply_response(cohort: &mut Cohort, request: ResponseRequest) -> Result<ResponseOutcome, PolicyError> {
    let alert = cohort
        .alert(request.alert_id)
        .cloned()
        .ok_or_else(|| PolicyError::NotFound { kind: "alert", id: request.alert_id.to_string() })?;
    let hcp = cohort
        .hcp(request.hcp_id)
        .cloned()
        .ok_or_else(|| PolicyError::NotFound { kind: "hcp", id: request.hcp_id.to_string() })?;
    if alert.status == AlertStatus::Resolved {
        return Err(PolicyError::AlreadyResolved(alert.id));
    }
    if request.timestamp < alert.created_at {
        return Err(PolicyError::BeforeAlert { alert: alert.id, at: request.timestamp, created: alert.created_at });
    }
    let measurement = cohort
        .measurement(alert.measurement_id)
        .cloned()
        .ok_or_else(|| PolicyError::NotFound { kind: "measurement", id: alert.measurement_id.to_string() })?;
    let patient = cohort
        .patient(alert.patient_id)
        .cloned()
        .ok_or_else(|| PolicyError::NotFound { kind: "patient", id: alert.patient_id.to_string() })?;

    let reading = Some((measurement.vital, measurement.value));
    let rx = (request.action == ResponseAction::AdjustMedication).then(|| {
        let strayed = strayed_direction(&alert, &measurement, *patient.baselines.get(measurement.vital));
        prescription(measurement.vital, strayed)
    });
    let note = request.note.clone().unwrap_or_else(|| {
        render_note(
            &hcp,
            &NoteEvent {
                subject: NoteSubject::Response(request.action),
                reading,
                severity: Some(alert.severity),
                medication: rx.map(|p| (p.drug.to_owned(), p.change)),
                variant: alert.id.0,
            },
        )
    });

    let response_id = cohort.next_response_id();
    cohort.responses.push(AlertResponse {
        id: response_id,
        alert_id: alert.id,
        hcp_id: hcp.id,
        action: request.action,
        note,
        timestamp: request.timestamp,
    });
    let mut outcome =
        ResponseOutcome { response_id, consultation_id: None, medication_change_id: None, reassigned_to: None };

    let date = request.timestamp.date();
    match request.action {
        ResponseAction::Dismiss => {}
        ResponseAction::CallPatient => {
            let channel =
                if cohort.admitted_on(patient.id, date).is_some() { Channel::InPerson } else { Channel::Phone };
            let subject = match channel {
                Channel::Phone => NoteSubject::PhoneCall,
                Channel::InPerson => NoteSubject::WardVisit,
            };
            let text = render_note(
                &hcp,
                &NoteEvent { subject, reading, severity: Some(alert.severity), medication: None, variant: alert.id.0 },
            );
            let id = cohort.next_consultation_id();
            cohort.consultations.push(Consultation {
                id,
                patient_id: patient.id,
                hcp_id: hcp.id,
                timestamp: request.timestamp,
                channel,
                text,
            });
            outcome.consultation_id = Some(id);
        }
        ResponseAction::AdjustMedication => {
            let rx = rx.expect("prescription chosen for adjustments");
            let id = cohort.next_medication_change_id();
            cohort.medication_changes.push(MedicationChange {
                id,
                patient_id: patient.id,
                drug: rx.drug.to_owned(),
                change: rx.change,
                timestamp: request.timestamp,
                effect: rx.effect,
            });
            outcome.medication_change_id = Some(id);
        }
        ResponseAction::ContactColleague => {
            let current = alert.assigned_hcp_id.unwrap_or(hcp.id);
            let next = successor(current, &cohort.hcps, date);
            if let Some(a) = cohort.alert_mut(alert.id) {
                a.assigned_hcp_id = next;
            }
            outcome.reassigned_to = next;
        }
    }
    if request.action.is_terminal() {
        if let Some(a) = cohort.alert_mut(alert.id) {
            a.status = AlertStatus::Resolved;
        }
    }
    Ok(outcome)
}

/// First response slot of a working day.
pub fn workday_start(date: NaiveDate) -> NaiveDateTime {
    date.and_hms_opt(13, 0, 0).expect("valid time")
}

/// One batch-mode working day: every open alert is routed to someone on
/// duty and handled. Each HCP handles a given alert at most once per day, so
/// a colleague hand-off lands with the next HCP the same day.
///
/// `withhold` lets a caller veto the medication change of selected
/// adjustments (used for counterfactual runs); the response itself is kept.
pub fn work_day(cohort: &mut Cohort, date: NaiveDate, withhold: &dyn Fn(AlertId) -> bool) {
    let mut slot = cohort.responses.iter().filter(|r| r.timestamp.date() == date).count() as i64;
    let mut queue: std::collections::VecDeque<AlertId> = std::collections::VecDeque::new();
    let hcps = cohort.hcps.clone();
    for alert in cohort.alerts.iter_mut().filter(|a| a.is_open()) {
        let on_duty =
            alert.assigned_hcp_id.and_then(|id| hcps.iter().find(|h| h.id == id)).is_some_and(|h| h.on_duty(date));
        if !on_duty {
            alert.assigned_hcp_id = assign(alert, &hcps, date);
        }
        if alert.assigned_hcp_id.is_some() {
            queue.push_back(alert.id);
        }
    }

    let mut handled = std::collections::HashSet::new();
    while let Some(alert_id) = queue.pop_front() {
        let Some(alert) = cohort.alert(alert_id).cloned() else { continue };
        let Some(hcp) = alert.assigned_hcp_id.and_then(|id| cohort.hcp(id)).cloned() else { continue };
        if !alert.is_open() || !hcp.on_duty(date) || !handled.insert((alert_id, hcp.id)) {
            continue;
        }
        let Some(ctx) = DecisionContext::build(cohort, &alert, &hcp, date) else { continue };
        let action = decide(&ctx);
        let timestamp = (workday_start(date) + Duration::minutes(slot)).max(alert.created_at);
        slot += 1;
        let request = ResponseRequest { alert_id, hcp_id: hcp.id, action, timestamp, note: None };
        let Ok(outcome) = apply_response(cohort, request) else { continue };
        if let Some(mc) = outcome.medication_change_id {
            if withhold(alert_id) {
                cohort.medication_changes.retain(|m| m.id != mc);
            }
        }
        if action == ResponseAction::ContactColleague && outcome.reassigned_to.is_some() {
            queue.push_back(alert_id);
        }
    }
}

#[cfg(test)]
mod tests;
