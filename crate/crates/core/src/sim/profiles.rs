//! Persona generation.
//!
//! Patient ranges:
//!
//! | field            | draw                                                   |
//! |------------------|--------------------------------------------------------|
//! | stability class  | balanced cycle stable/fluctuating/spiky, shuffled      |
//! | age              | uniform 48..=89                                        |
//! | comorbidities    | 0..=3 tags from a fixed pool                           |
//! | adherence        | stable 0.85-0.98, fluctuating 0.70-0.95, spiky 0.60-0.90 |
//! | home support     | high or low, even odds                                 |
//! | baselines        | weight 60-110 kg, systolic 105-140, diastolic 62-85, HR 60-85 |
//! | thresholds       | baseline minus/plus a per-vital offset range (see `LIMIT_OFFSETS`) |
//!
//! HCP ranges: every third HCP is a physician; 40% are novices; novice
//! confidence 0.25-0.70, experienced 0.55-0.95; terse or verbose notes at
//! even odds; 3 to 5 weekdays on duty. The roster is then repaired so every
//! weekday has at least one HCP on duty who will not defer to a colleague.

use std::collections::BTreeSet;

use chrono::Weekday;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::rng::{stream, Purpose};
use crate::config::SimulationConfig;
use crate::domain::{
    DocStyle, DutyDays, Experience, HcpId, HcpProfile, HcpRole, HomeSupport, PatientId, PatientProfile, StabilityClass,
    Threshold, Vital, VitalMap,
};

const FIRST_NAMES: &[&str] = &[
    "Anna", "Bram", "Carla", "Dirk", "Els", "Frans", "Greet", "Henk", "Ilse", "Joop", "Karin", "Lex", "Marja", "Niels",
    "Olga", "Piet", "Roos", "Sem", "Tineke", "Wim",
];
const SURNAMES: &[&str] = &[
    "de Vries", "Jansen", "Bakker", "Visser", "Smit", "Meijer", "Mulder", "de Boer", "Bos", "Peters", "Hendriks",
    "Dekker",
];
const COMORBIDITIES: &[&str] =
    &["atrial fibrillation", "chronic kidney disease", "COPD", "diabetes", "hypertension", "obesity"];

/// Baseline ranges per vital.
const BASELINES: VitalMap<(f64, f64)> = VitalMap {
    weight: (60.0, 110.0),
    systolic_bp: (105.0, 140.0),
    diastolic_bp: (62.0, 85.0),
    heart_rate: (60.0, 85.0),
};

/// (low offset range, high offset range) from the baseline to each limit.
const LIMIT_OFFSETS: VitalMap<((f64, f64), (f64, f64))> = VitalMap {
    weight: ((3.0, 4.0), (1.5, 2.0)),
    systolic_bp: ((18.0, 24.0), (16.0, 22.0)),
    diastolic_bp: ((12.0, 16.0), (11.0, 15.0)),
    heart_rate: ((15.0, 20.0), (14.0, 18.0)),
};

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..=hi)
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn patient(config: &SimulationConfig, index: u32, class: StabilityClass, rng: &mut ChaCha8Rng) -> PatientProfile {
    let first = FIRST_NAMES.choose(rng).copied().unwrap_or("Pat");
    let last = SURNAMES.choose(rng).copied().unwrap_or("Doe");
    let age = rng.random_range(48..=89);
    let n_comorbid = rng.random_range(0..=3);
    let comorbidities: BTreeSet<String> =
        COMORBIDITIES.choose_multiple(rng, n_comorbid).map(|s| (*s).to_owned()).collect();
    let adherence_range = match class {
        StabilityClass::Stable => (0.85, 0.98),
        StabilityClass::Fluctuating => (0.70, 0.95),
        StabilityClass::Spiky => (0.60, 0.90),
    };
    let adherence = round2(uniform(rng, adherence_range));
    let home_support = if rng.random_bool(0.5) { HomeSupport::High } else { HomeSupport::Low };

    let mut baselines = VitalMap::from_fn(|_| 0.0);
    let mut thresholds = VitalMap::from_fn(|_| Threshold::new(0.0, 0.0));
    for &vital in Vital::ALL {
        let base = vital.quantize(uniform(rng, *BASELINES.get(vital)));
        let (low_off, high_off) = *LIMIT_OFFSETS.get(vital);
        let low = vital.quantize(base - uniform(rng, low_off));
        let high = vital.quantize(base + uniform(rng, high_off));
        *baselines.get_mut(vital) = base;
        *thresholds.get_mut(vital) = Threshold::new(low, high);
    }
    // Diastolic must stay below systolic for the persona to make sense.
    if baselines.diastolic_bp >= baselines.systolic_bp - 25.0 {
        let shift = baselines.diastolic_bp - (baselines.systolic_bp - 25.0);
        baselines.diastolic_bp -= shift;
        thresholds.diastolic_bp.low -= shift;
        thresholds.diastolic_bp.high -= shift;
    }

    PatientProfile {
        id: PatientId(index + 1),
        display_name: format!("{first} {last}"),
        age,
        comorbidities,
        stability_class: class,
        adherence,
        home_support,
        enrollment_date: config.start_date,
        baselines,
        thresholds,
    }
}

const WORKWEEK: [Weekday; 5] = [Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu, Weekday::Fri];

/// Whether an HCP resolves alerts alone rather than deferring to a colleague.
pub fn resolves_alone(hcp: &HcpProfile) -> bool {
    !(hcp.experience == Experience::Novice && hcp.confidence < 0.5)
}

fn hcp(index: u32, rng: &mut ChaCha8Rng) -> HcpProfile {
    let role = if index % 3 == 2 { HcpRole::Physician } else { HcpRole::Nurse };
    let experience = if rng.random_bool(0.4) { Experience::Novice } else { Experience::Experienced };
    let confidence = round2(match experience {
        Experience::Novice => uniform(rng, (0.25, 0.70)),
        Experience::Experienced => uniform(rng, (0.55, 0.95)),
    });
    let doc_style = if rng.random_bool(0.5) { DocStyle::Terse } else { DocStyle::Verbose };
    let n_days = rng.random_range(3..=5);
    let mut days = WORKWEEK;
    days.shuffle(rng);
    let duty_days = DutyDays::from_days(days[..n_days].iter().copied());
    let surname = SURNAMES.choose(rng).copied().unwrap_or("Doe");
    let title = match role {
        HcpRole::Nurse => "Nurse",
        HcpRole::Physician => "Dr.",
    };
    HcpProfile {
        id: HcpId(index + 1),
        display_name: format!("{title} {surname}"),
        role,
        experience,
        confidence,
        doc_style,
        duty_days,
    }
}

fn repair_roster(hcps: &mut [HcpProfile]) {
    if hcps.is_empty() {
        return;
    }
    if !hcps.iter().any(resolves_alone) {
        let first = &mut hcps[0];
        first.experience = Experience::Experienced;
        first.confidence = first.confidence.max(0.6);
    }
    let n = hcps.len();
    for (i, &day) in WORKWEEK.iter().enumerate() {
        if !hcps.iter().any(|h| h.duty_days.contains(day)) {
            hcps[i % n].duty_days.insert(day);
        }
        if !hcps.iter().any(|h| h.duty_days.contains(day) && resolves_alone(h)) {
            let pick =
                (0..n).map(|k| (i + k) % n).find(|&k| resolves_alone(&hcps[k])).expect("at least one capable hcp");
            hcps[pick].duty_days.insert(day);
        }
    }
}

/// Draws the patient and HCP rosters for a run.
pub fn generate_profiles(config: &SimulationConfig) -> (Vec<PatientProfile>, Vec<HcpProfile>) {
    let mut rng = stream(config.seed, Purpose::Patients, 0, 0);
    let mut classes: Vec<StabilityClass> =
        (0..config.n_patients).map(|i| StabilityClass::ALL[i as usize % StabilityClass::ALL.len()]).collect();
    classes.shuffle(&mut rng);
    let patients =
        classes.into_iter().enumerate().map(|(i, class)| patient(config, i as u32, class, &mut rng)).collect();

    let mut rng = stream(config.seed, Purpose::Hcps, 0, 0);
    let mut hcps: Vec<HcpProfile> = (0..config.n_hcps).map(|i| hcp(i, &mut rng)).collect();
    repair_roster(&mut hcps);
    (patients, hcps)
}
