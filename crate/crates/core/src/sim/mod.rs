//! Day-by-day cohort simulation.
//!
//! Each simulated day runs in a fixed order:
//!
//! 1. admissions starting today get a bedside consultation;
//! 2. every patient submits all four vitals with probability `adherence`
//!    (scaled by `admission_adherence_multiplier` while admitted), each
//!    value produced by [`next_value`] and checked by the alert rules;
//! 3. in batch mode the HCP personas work through the open alerts;
//! 4. patients that crossed the admission trigger are admitted from the
//!    next day on.
//!
//! In interactive mode step 3 is left to a human and the run halts at the
//! end of any day that leaves alerts open.

mod messiness;
mod profiles;
mod rng;
mod trajectory;

use std::collections::{BTreeSet, HashMap};

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

pub use messiness::{inject_messiness, strip_messiness};
pub use profiles::{generate_profiles, resolves_alone};
pub use trajectory::{next_value, spike_schedule, ActiveEffect, PatientState, Spike};

use crate::alert::{evaluate, AlertRuleParams};
use crate::config::{Mode, SimulationConfig};
use crate::domain::{
    Admission, AlertId, Channel, Cohort, Consultation, HcpProfile, HcpRole, HomeSupport, Measurement, PatientId,
    PatientProfile, Severity, Vital,
};
use crate::policy::{self, render_note, NoteEvent, NoteSubject};
use rng::{stream, Purpose};

/// Hooks for counterfactual runs.
#[derive(Debug, Clone, Default)]
pub struct Interventions {
    /// Adjust-medication responses to these alerts are recorded but their
    /// medication change is not.
    pub withhold_medication_for: BTreeSet<AlertId>,
}

/// Counts produced by a stretch of simulated days.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DayReport {
    pub days_advanced: u32,
    pub new_measurements: usize,
    pub new_alerts: usize,
    pub new_admissions: usize,
    /// Stopped early because alerts are waiting for a human.
    pub halted: bool,
    pub complete: bool,
}

/// Runs a configured simulation to completion (batch) or until the first
/// day that leaves alerts open (interactive).
pub fn simulate(config: &SimulationConfig) -> Cohort {
    Simulator::new(config.clone()).run()
}

pub struct Simulator {
    cohort: Cohort,
    interventions: Interventions,
}

impl Simulator {
    pub fn new(config: SimulationConfig) -> Self {
        let (patients, hcps) = generate_profiles(&config);
        Self::with_profiles(config, patients, hcps)
    }

    /// Uses hand-made rosters instead of generated ones.
    pub fn with_profiles(config: SimulationConfig, patients: Vec<PatientProfile>, hcps: Vec<HcpProfile>) -> Self {
        let mut cohort = Cohort::empty(config);
        cohort.patients = patients;
        cohort.hcps = hcps;
        Simulator { cohort, interventions: Interventions::default() }
    }

    pub fn interventions(mut self, interventions: Interventions) -> Self {
        self.interventions = interventions;
        self
    }

    pub fn run(self) -> Cohort {
        let mut cohort = self.cohort;
        let budget = cohort.config.duration_days;
        run_days(&mut cohort, budget, &self.interventions);
        cohort
    }
}

/// Resumes an interactive run for up to `days` further days, stopping at
/// the end of the first day that leaves alerts open.
pub fn resume(cohort: &mut Cohort, days: u32) -> DayReport {
    run_days(cohort, days, &Interventions::default())
}

const SUBMISSION_START_HOUR: u32 = 7;
const SUBMISSION_WINDOW_MINUTES: u32 = 300;

fn run_days(cohort: &mut Cohort, budget: u32, interventions: &Interventions) -> DayReport {
    let mut report = DayReport::default();
    let before = (cohort.measurements.len(), cohort.alerts.len(), cohort.admissions.len());
    let params = AlertRuleParams::from(&cohort.config);
    let spikes: HashMap<PatientId, Vec<Spike>> =
        cohort.patients.iter().map(|p| (p.id, spike_schedule(&cohort.config, p))).collect();
    let mut history = HistoryIndex::build(cohort);
    let withhold = |id: AlertId| interventions.withhold_medication_for.contains(&id);

    while report.days_advanced < budget && !cohort.is_complete() {
        let day = cohort.days_simulated;
        let date = cohort.date_of_day(day);

        open_ward_visits(cohort, date);
        submit_measurements(cohort, day, date, &params, &spikes, &mut history);
        if cohort.config.mode == Mode::Batch {
            policy::work_day(cohort, date, &withhold);
        }
        check_admissions(cohort, day, date);

        cohort.days_simulated += 1;
        report.days_advanced += 1;
        if cohort.config.mode == Mode::Interactive && cohort.open_alert_count() > 0 {
            report.halted = true;
            break;
        }
    }

    report.new_measurements = cohort.measurements.len() - before.0;
    report.new_alerts = cohort.alerts.len() - before.1;
    report.new_admissions = cohort.admissions.len() - before.2;
    report.complete = cohort.is_complete();
    report
}

/// Positions of each patient's readings per vital, in time order.
struct HistoryIndex {
    streams: HashMap<(PatientId, Vital), Vec<usize>>,
}

impl HistoryIndex {
    fn build(cohort: &Cohort) -> Self {
        let mut streams: HashMap<(PatientId, Vital), Vec<usize>> = HashMap::new();
        for (i, m) in cohort.measurements.iter().enumerate() {
            streams.entry((m.patient_id, m.vital)).or_default().push(i);
        }
        for positions in streams.values_mut() {
            positions.sort_by_key(|&i| (cohort.measurements[i].timestamp, cohort.measurements[i].id));
        }
        HistoryIndex { streams }
    }

    fn recent<'a>(&self, cohort: &'a Cohort, key: (PatientId, Vital), since: NaiveDate) -> Vec<&'a Measurement> {
        let Some(positions) = self.streams.get(&key) else {
            return Vec::new();
        };
        let start =
            positions.iter().rposition(|&i| cohort.measurements[i].timestamp.date() < since).map_or(0, |p| p + 1);
        positions[start..].iter().map(|&i| &cohort.measurements[i]).collect()
    }

    fn push(&mut self, key: (PatientId, Vital), position: usize) {
        self.streams.entry(key).or_default().push(position);
    }
}

fn submit_measurements(
    cohort: &mut Cohort,
    day: u32,
    date: NaiveDate,
    params: &AlertRuleParams,
    spikes: &HashMap<PatientId, Vec<Spike>>,
    history: &mut HistoryIndex,
) {
    let config = cohort.config.clone();
    let window_start = date - Duration::days(i64::from(config.abrupt_window_days));
    let patients = cohort.patients.clone();
    for profile in &patients {
        // Fixed draw order per patient-day, whatever happens with the draws.
        let mut rng = stream(config.seed, Purpose::Day, u64::from(profile.id.0), u64::from(day));
        let u_submit: f64 = rng.random();
        let minute = rng.random_range(0..SUBMISSION_WINDOW_MINUTES);
        let draws: Vec<(f64, f64, u32)> =
            Vital::ALL.iter().map(|_| (rng.sample(StandardNormal), rng.random(), rng.random())).collect();

        if date < profile.enrollment_date {
            continue;
        }
        let admitted = cohort.admitted_on(profile.id, date).is_some();
        let p_submit =
            if admitted { profile.adherence * config.admission_adherence_multiplier } else { profile.adherence };
        if u_submit >= p_submit {
            continue;
        }

        let state = PatientState {
            profile,
            noise_amplitude: crate::domain::VitalMap::from_fn(|v| {
                config.noise_amplitude.get(profile.stability_class, v)
            }),
            effects: cohort
                .medication_changes
                .iter()
                .filter(|m| m.patient_id == profile.id)
                .map(|m| ActiveEffect { since: m.timestamp.date(), effect: m.effect })
                .collect(),
            spikes: spikes.get(&profile.id).map_or(&[], Vec::as_slice),
            admitted,
        };
        let timestamp =
            date.and_hms_opt(SUBMISSION_START_HOUR, 0, 0).expect("valid time") + Duration::minutes(i64::from(minute));

        for (&vital, &(noise_draw, u_comment, template)) in Vital::ALL.iter().zip(&draws) {
            let raw = next_value(&state, vital, date, noise_draw);
            let value = vital.quantize(raw).max(vital.floor());
            let limits = profile.thresholds.get(vital);
            let breach = limits.breached_by(value);
            let p_comment = if breach {
                (config.messiness.p_situated_comment * 3.0).min(1.0)
            } else {
                config.messiness.p_situated_comment
            };
            let comment = (u_comment < p_comment).then(|| {
                let direction = if value > limits.high {
                    Some(true)
                } else if value < limits.low {
                    Some(false)
                } else {
                    None
                };
                situated_comment(vital, direction, profile.home_support, template)
            });

            let measurement = Measurement {
                id: cohort.next_measurement_id(),
                patient_id: profile.id,
                timestamp,
                vital,
                value,
                comment,
            };
            let key = (profile.id, vital);
            let draft = {
                let recent = history.recent(cohort, key, window_start);
                evaluate(&measurement, profile, recent, params)
            };
            cohort.measurements.push(measurement);
            history.push(key, cohort.measurements.len() - 1);
            if let Some(draft) = draft {
                let id = cohort.next_alert_id();
                let mut alert = draft.into_alert(id, None);
                alert.assigned_hcp_id = policy::assign(&alert, &cohort.hcps, date);
                cohort.alerts.push(alert);
            }
        }
    }
}

fn situated_comment(vital: Vital, breach_high: Option<bool>, support: HomeSupport, pick: u32) -> String {
    let options: &[&str] = match (vital, breach_high, support) {
        (Vital::Weight, Some(true), HomeSupport::High) => {
            &["My daughter says my ankles look swollen", "We had a family dinner yesterday, quite salty"]
        }
        (Vital::Weight, Some(true), HomeSupport::Low) => {
            &["Ankles swollen, shoes feel tight", "Forgot my water pill yesterday"]
        }
        (Vital::Weight, Some(false), _) => &["Not much appetite lately", "Had a stomach bug"],
        (Vital::SystolicBp | Vital::DiastolicBp, Some(true), _) => {
            &["Bit of a headache this morning", "Stressful day, measured right after the stairs"]
        }
        (Vital::SystolicBp | Vital::DiastolicBp, Some(false), _) => {
            &["Felt dizzy when standing up", "Light-headed after breakfast"]
        }
        (Vital::HeartRate, Some(true), _) => &["Heart racing after walking the dog", "Palpitations last night"],
        (Vital::HeartRate, Some(false), _) => &["Feeling tired and slow today", "Slept badly"],
        (_, None, HomeSupport::High) => &["Feeling fine today", "Measured together with my husband"],
        (_, None, HomeSupport::Low) => &["Feeling ok", "Not sure the cuff was on right"],
    };
    options[pick as usize % options.len()].to_owned()
}

/// Logs a bedside consultation for admissions that start on `date`.
fn open_ward_visits(cohort: &mut Cohort, date: NaiveDate) {
    let starting: Vec<Admission> = cohort.admissions.iter().filter(|a| a.start == date).cloned().collect();
    for admission in starting {
        let on_duty: Vec<&HcpProfile> = cohort.hcps.iter().filter(|h| h.on_duty(date)).collect();
        let hcp = if on_duty.is_empty() {
            cohort.hcps.iter().find(|h| h.role == HcpRole::Physician).or_else(|| cohort.hcps.first())
        } else {
            Some(on_duty[admission.id.0 as usize % on_duty.len()])
        };
        let Some(hcp) = hcp.cloned() else { continue };
        let text = render_note(
            &hcp,
            &NoteEvent {
                subject: NoteSubject::WardVisit,
                reading: None,
                severity: None,
                medication: None,
                variant: admission.id.0,
            },
        );
        let id = cohort.next_consultation_id();
        cohort.consultations.push(Consultation {
            id,
            patient_id: admission.patient_id,
            hcp_id: hcp.id,
            timestamp: ward_round(date),
            channel: Channel::InPerson,
            text,
        });
    }
}

fn ward_round(date: NaiveDate) -> NaiveDateTime {
    date.and_hms_opt(9, 0, 0).expect("valid time")
}

/// Admits patients whose recent high-severity alerts reach the trigger.
/// Only alerts since the last discharge count.
fn check_admissions(cohort: &mut Cohort, day: u32, date: NaiveDate) {
    let config = cohort.config.clone();
    let policy = config.admission_policy;
    let start = date + Duration::days(1);
    if day + 1 >= config.duration_days {
        return;
    }
    let window_start = date - Duration::days(i64::from(policy.window_days) - 1);
    let patient_ids: Vec<PatientId> = cohort.patients.iter().map(|p| p.id).collect();
    for patient_id in patient_ids {
        let stays = cohort.admissions.iter().filter(|a| a.patient_id == patient_id);
        let last_discharge = stays.clone().map(|a| a.end).max();
        if stays.clone().any(|a| a.end > date) {
            continue;
        }
        let from = last_discharge.map_or(window_start, |d| d.max(window_start));
        let high = cohort
            .alerts
            .iter()
            .filter(|a| {
                a.patient_id == patient_id
                    && a.severity == Severity::High
                    && a.created_at.date() >= from
                    && a.created_at.date() <= date
            })
            .count() as u32;
        if high < policy.trigger_high_alerts {
            continue;
        }
        let mut rng = stream(config.seed, Purpose::Stay, u64::from(patient_id.0), u64::from(day));
        let stay = rng.random_range(policy.stay_days.min..=policy.stay_days.max);
        let id = cohort.next_admission_id();
        cohort.admissions.push(Admission {
            id,
            patient_id,
            start,
            end: start + Duration::days(i64::from(stay)),
            reason: format!("Decompensation: {high} high-severity alerts in {} days", policy.window_days),
        });
    }
}
