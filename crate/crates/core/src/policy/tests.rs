use std::collections::BTreeSet;

use chrono::{NaiveDate, NaiveTime, Weekday};

use super::*;
use crate::config::SimulationConfig;
use crate::domain::{
    DocStyle, DutyDays, Experience, HcpRole, HomeSupport, MeasurementId, PatientId, PatientProfile, Threshold, VitalMap,
};

fn date(d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, d).unwrap()
}

fn at(d: u32, h: u32, m: u32) -> NaiveDateTime {
    date(d).and_time(NaiveTime::from_hms_opt(h, m, 0).unwrap())
}

fn hcp(id: u32, experience: Experience, confidence: f64, days: &[Weekday]) -> HcpProfile {
    HcpProfile {
        id: HcpId(id),
        display_name: format!("Nurse {id}"),
        role: HcpRole::Nurse,
        experience,
        confidence,
        doc_style: DocStyle::Terse,
        duty_days: DutyDays::from_days(days.iter().copied()),
    }
}

const WEEK: &[Weekday] = &[Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu, Weekday::Fri];

fn patient() -> PatientProfile {
    PatientProfile {
        id: PatientId(1),
        display_name: "Anna Bos".into(),
        age: 70,
        comorbidities: BTreeSet::new(),
        stability_class: StabilityClass::Stable,
        adherence: 0.9,
        home_support: HomeSupport::High,
        enrollment_date: date(1),
        baselines: VitalMap { weight: 84.0, systolic_bp: 120.0, diastolic_bp: 75.0, heart_rate: 70.0 },
        thresholds: VitalMap {
            weight: Threshold::new(80.0, 85.0),
            systolic_bp: Threshold::new(100.0, 140.0),
            diastolic_bp: Threshold::new(60.0, 90.0),
            heart_rate: Threshold::new(50.0, 90.0),
        },
    }
}

/// One patient, three weekday nurses, no events.
fn cohort() -> Cohort {
    let mut c = Cohort::empty(SimulationConfig::default());
    c.patients = vec![patient()];
    c.hcps = vec![
        hcp(1, Experience::Experienced, 0.8, WEEK),
        hcp(2, Experience::Novice, 0.3, WEEK),
        hcp(3, Experience::Experienced, 0.9, WEEK),
    ];
    c
}

fn add_alert(
    c: &mut Cohort,
    vital: Vital,
    value: f64,
    rules: &[AlertRule],
    severity: Severity,
    when: NaiveDateTime,
) -> AlertId {
    let mid = c.next_measurement_id();
    c.measurements.push(Measurement {
        id: mid,
        patient_id: PatientId(1),
        timestamp: when,
        vital,
        value,
        comment: None,
    });
    let id = c.next_alert_id();
    let mut alert = Alert {
        id,
        patient_id: PatientId(1),
        measurement_id: mid,
        rules: rules.iter().copied().collect(),
        severity,
        created_at: when,
        status: AlertStatus::Open,
        assigned_hcp_id: None,
    };
    alert.assigned_hcp_id = assign(&alert, &c.hcps, when.date());
    c.alerts.push(alert);
    id
}

fn request(alert_id: AlertId, hcp_id: u32, action: ResponseAction, when: NaiveDateTime) -> ResponseRequest {
    ResponseRequest { alert_id, hcp_id: HcpId(hcp_id), action, timestamp: when, note: None }
}

fn bare_alert(id: u32) -> Alert {
    Alert {
        id: AlertId(id),
        patient_id: PatientId(1),
        measurement_id: MeasurementId(1),
        rules: [AlertRule::ThresholdHigh].into(),
        severity: Severity::Mild,
        created_at: at(6, 8, 0),
        status: AlertStatus::Open,
        assigned_hcp_id: None,
    }
}

#[test]
fn saturday_alert_waits_for_monday() {
    let hcps = vec![hcp(1, Experience::Experienced, 0.8, WEEK)];
    assert_eq!(assign(&bare_alert(1), &hcps, date(6)), None);
    assert_eq!(assign(&bare_alert(1), &hcps, date(7)), None);
    assert_eq!(assign(&bare_alert(1), &hcps, date(8)), Some(HcpId(1)));
}

#[test]
fn single_hcp_on_duty_gets_everything() {
    let hcps = vec![
        hcp(1, Experience::Experienced, 0.8, &[Weekday::Mon]),
        hcp(2, Experience::Experienced, 0.8, &[Weekday::Tue]),
    ];
    for id in 1..10 {
        assert_eq!(assign(&bare_alert(id), &hcps, date(2)), Some(HcpId(2)));
    }
}

#[test]
fn round_robin_alternates_by_alert_id() {
    let hcps = vec![hcp(1, Experience::Experienced, 0.8, WEEK), hcp(2, Experience::Experienced, 0.8, WEEK)];
    let picks: Vec<_> = (1..=4).map(|id| assign(&bare_alert(id), &hcps, date(2)).unwrap().0).collect();
    assert_eq!(picks, vec![2, 1, 2, 1]);
}

#[test]
fn successor_wraps_and_skips_off_duty() {
    let hcps = vec![
        hcp(1, Experience::Experienced, 0.8, WEEK),
        hcp(2, Experience::Experienced, 0.8, &[Weekday::Sat]),
        hcp(3, Experience::Experienced, 0.8, WEEK),
    ];
    assert_eq!(successor(HcpId(1), &hcps, date(2)), Some(HcpId(3)));
    assert_eq!(successor(HcpId(3), &hcps, date(2)), Some(HcpId(1)));
    assert_eq!(successor(HcpId(1), &hcps, date(7)), None);
}

#[test]
fn weekday_roster_gap_after_friday() {
    let hcps = vec![hcp(1, Experience::Experienced, 0.8, WEEK)];
    assert_eq!(days_until_next_duty(&hcps, date(5)), 3);
    assert_eq!(days_until_next_duty(&hcps, date(4)), 1);
    let weekend =
        vec![hcp(1, Experience::Experienced, 0.8, WEEK), hcp(2, Experience::Experienced, 0.8, &[Weekday::Sat])];
    assert_eq!(days_until_next_duty(&weekend, date(5)), 1);
}

#[test]
fn repeat_count_covers_one_week_of_the_same_vital() {
    let mut c = cohort();
    let th = &[AlertRule::ThresholdHigh];
    add_alert(&mut c, Vital::Weight, 86.0, th, Severity::Mild, at(1, 8, 0));
    add_alert(&mut c, Vital::HeartRate, 95.0, th, Severity::Mild, at(3, 8, 0));
    add_alert(&mut c, Vital::Weight, 86.0, th, Severity::Mild, at(4, 8, 0));
    let last = add_alert(&mut c, Vital::Weight, 86.0, th, Severity::Mild, at(8, 8, 0));
    let alert = c.alert(last).unwrap().clone();
    let ctx = DecisionContext::build(&c, &alert, &c.hcps[0], date(8)).unwrap();
    // Jan 1 is exactly seven days back and falls outside the window.
    assert_eq!(ctx.repeat_count, 2);
    assert_eq!(ctx.weekday, Weekday::Mon);
}

#[test]
fn dismiss_records_one_response_and_resolves() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::Weight, 85.6, &[AlertRule::ThresholdHigh], Severity::Mild, at(2, 8, 0));
    let out = apply_response(&mut c, request(id, 1, ResponseAction::Dismiss, at(2, 13, 0))).unwrap();
    assert_eq!(c.responses.len(), 1);
    assert_eq!(c.responses[0].id, out.response_id);
    assert_eq!(c.responses[0].note, "weight 85.6 kg noted, no action.");
    assert!(c.consultations.is_empty() && c.medication_changes.is_empty());
    assert_eq!(c.alert(id).unwrap().status, AlertStatus::Resolved);
}

#[test]
fn adjust_on_high_weight_prescribes_a_diuretic() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::Weight, 86.5, &[AlertRule::ThresholdHigh], Severity::High, at(2, 8, 0));
    let out = apply_response(&mut c, request(id, 1, ResponseAction::AdjustMedication, at(2, 13, 5))).unwrap();
    assert_eq!(c.medication_changes.len(), 1);
    let mc = &c.medication_changes[0];
    assert_eq!(Some(mc.id), out.medication_change_id);
    assert_eq!(mc.timestamp, at(2, 13, 5));
    assert_eq!(mc.change, MedicationChangeKind::Increase);
    assert_eq!(mc.effect.direction, Direction::Down);
    assert_eq!(mc.effect.magnitude, 1.5);
    assert_eq!(mc.effect.vital, Vital::Weight);
}

#[test]
fn abrupt_drop_without_threshold_uses_baseline_side() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::SystolicBp, 101.0, &[AlertRule::AbruptChange], Severity::Mild, at(2, 8, 0));
    apply_response(&mut c, request(id, 1, ResponseAction::AdjustMedication, at(2, 13, 0))).unwrap();
    assert_eq!(c.medication_changes[0].effect.direction, Direction::Up);
}

#[test]
fn call_logs_phone_or_ward_consultation() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::HeartRate, 101.0, &[AlertRule::ThresholdHigh], Severity::High, at(2, 8, 0));
    let out = apply_response(&mut c, request(id, 3, ResponseAction::CallPatient, at(2, 13, 0))).unwrap();
    assert_eq!(c.consultations[0].channel, Channel::Phone);
    assert_eq!(Some(c.consultations[0].id), out.consultation_id);

    c.admissions.push(crate::domain::Admission {
        id: crate::domain::AdmissionId(1),
        patient_id: PatientId(1),
        start: date(3),
        end: date(6),
        reason: "test".into(),
    });
    let id = add_alert(&mut c, Vital::HeartRate, 101.0, &[AlertRule::ThresholdHigh], Severity::High, at(4, 8, 0));
    apply_response(&mut c, request(id, 3, ResponseAction::CallPatient, at(4, 13, 0))).unwrap();
    assert_eq!(c.consultations[1].channel, Channel::InPerson);
}

#[test]
fn contact_colleague_keeps_alert_open_and_hands_over() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::Weight, 85.5, &[AlertRule::ThresholdHigh], Severity::Mild, at(2, 8, 0));
    c.alert_mut(id).unwrap().assigned_hcp_id = Some(HcpId(2));
    let out = apply_response(&mut c, request(id, 2, ResponseAction::ContactColleague, at(2, 13, 0))).unwrap();
    assert_eq!(out.reassigned_to, Some(HcpId(3)));
    let alert = c.alert(id).unwrap();
    assert!(alert.is_open());
    assert_eq!(alert.assigned_hcp_id, Some(HcpId(3)));
}

#[test]
fn resolved_alerts_reject_further_responses() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::Weight, 85.5, &[AlertRule::ThresholdHigh], Severity::Mild, at(2, 8, 0));
    apply_response(&mut c, request(id, 1, ResponseAction::Dismiss, at(2, 13, 0))).unwrap();
    let err = apply_response(&mut c, request(id, 3, ResponseAction::CallPatient, at(2, 13, 1))).unwrap_err();
    assert_eq!(err, PolicyError::AlreadyResolved(id));
    assert_eq!(c.responses.len(), 1);
}

#[test]
fn unknown_ids_and_backdated_responses_are_rejected() {
    let mut c = cohort();
    let id = add_alert(&mut c, Vital::Weight, 85.5, &[AlertRule::ThresholdHigh], Severity::Mild, at(2, 8, 0));
    let err = apply_response(&mut c, request(AlertId(99), 1, ResponseAction::Dismiss, at(2, 13, 0))).unwrap_err();
    assert!(matches!(err, PolicyError::NotFound { kind: "alert", .. }));
    let err = apply_response(&mut c, request(id, 42, ResponseAction::Dismiss, at(2, 13, 0))).unwrap_err();
    assert!(matches!(err, PolicyError::NotFound { kind: "hcp", .. }));
    let err = apply_response(&mut c, request(id, 1, ResponseAction::Dismiss, at(2, 7, 0))).unwrap_err();
    assert!(matches!(err, PolicyError::BeforeAlert { .. }));
    assert!(c.responses.is_empty());
}

#[test]
fn work_day_hands_novice_deferrals_to_a_colleague_the_same_day() {
    let mut c = cohort();
    add_alert(&mut c, Vital::Weight, 85.5, &[AlertRule::ThresholdHigh], Severity::Mild, at(2, 8, 0));
    add_alert(&mut c, Vital::Weight, 85.4, &[AlertRule::ThresholdHigh], Severity::Mild, at(2, 8, 0));
    for a in c.alerts.iter_mut() {
        a.assigned_hcp_id = Some(HcpId(2));
    }
    work_day(&mut c, date(2), &|_| false);
    assert_eq!(c.open_alert_count(), 0);
    let actions: Vec<_> = c.responses.iter().map(|r| (r.alert_id.0, r.hcp_id.0, r.action)).collect();
    assert_eq!(
        actions,
        vec![
            (1, 2, ResponseAction::ContactColleague),
            (2, 2, ResponseAction::ContactColleague),
            (1, 3, ResponseAction::Dismiss),
            (2, 3, ResponseAction::Dismiss),
        ]
    );
    let stamps: Vec<_> = c.responses.iter().map(|r| r.timestamp).collect();
    assert_eq!(stamps, vec![at(2, 13, 0), at(2, 13, 1), at(2, 13, 2), at(2, 13, 3)]);
}

#[test]
fn work_day_leaves_weekend_alerts_for_monday() {
    let mut c = cohort();
    add_alert(&mut c, Vital::Weight, 85.5, &[AlertRule::ThresholdHigh], Severity::Mild, at(6, 8, 0));
    work_day(&mut c, date(6), &|_| false);
    work_day(&mut c, date(7), &|_| false);
    assert_eq!(c.open_alert_count(), 1);
    work_day(&mut c, date(8), &|_| false);
    assert_eq!(c.open_alert_count(), 0);
    assert_eq!(c.responses[0].timestamp.date(), date(8));
}

#[test]
fn withheld_adjustments_keep_the_response_only() {
    let mut c = cohort();
    let th = &[AlertRule::ThresholdHigh];
    for d in 1..=3 {
        add_alert(&mut c, Vital::Weight, 85.5, th, Severity::Mild, at(d, 8, 0));
    }
    work_day(&mut c, date(3), &|id| id == AlertId(3));
    let adjust = c.responses.iter().find(|r| r.alert_id == AlertId(3)).unwrap();
    assert_eq!(adjust.action, ResponseAction::AdjustMedication);
    assert!(c.medication_changes.is_empty());
}
