//! Real-world data defects, added to a finished cohort and recorded in the
//! truth ledger so they can be told apart from simulated signal.

use chrono::Duration;
use rand::Rng;

use super::rng::{stream, Purpose};
use crate::domain::{Cohort, LedgerKind, Measurement, TruthLedgerEntry};

const IRRELEVANT_COMMENTS: &[&str] = &[
    "Grandchildren visiting this weekend",
    "Nice weather today",
    "The app asked me to update",
    "Going to the market later",
    "Watched the football yesterday",
    "New batteries in the scale",
];

/// Adds duplicate readings and off-topic comments.
///
/// Duplicates copy a reading under a fresh id, 1 to 120 seconds later.
/// Off-topic comments only go on readings without a comment. Does nothing
/// when the cohort already carries injected defects.
pub fn inject_messiness(cohort: &mut Cohort) {
    if !cohort.truth_ledger.is_empty() {
        return;
    }
    let p = cohort.config.messiness;
    let mut rng = stream(cohort.config.seed, Purpose::Messiness, 0, 0);
    let mut next_id = cohort.next_measurement_id();
    let mut duplicates = Vec::new();

    for m in cohort.measurements.iter_mut() {
        let u_duplicate: f64 = rng.random();
        let jitter = rng.random_range(1..=120);
        let u_comment: f64 = rng.random();
        let pick = rng.random_range(0..IRRELEVANT_COMMENTS.len());

        if m.comment.is_none() && u_comment < p.p_irrelevant_comment {
            m.comment = Some(IRRELEVANT_COMMENTS[pick].to_owned());
            cohort.truth_ledger.push(TruthLedgerEntry {
                kind: LedgerKind::InjectedIrrelevantComment,
                original_id: None,
                injected_id: m.id,
            });
        }
        if u_duplicate < p.p_duplicate {
            duplicates.push(Measurement {
                id: next_id,
                timestamp: m.timestamp + Duration::seconds(jitter),
                ..m.clone()
            });
            cohort.truth_ledger.push(TruthLedgerEntry {
                kind: LedgerKind::InjectedDuplicate,
                original_id: Some(m.id),
                injected_id: next_id,
            });
            next_id.0 += 1;
        }
    }
    cohort.measurements.extend(duplicates);
}

/// Undoes [`inject_messiness`] using the truth ledger.
pub fn strip_messiness(cohort: &mut Cohort) {
    let injected = cohort.injected_measurement_ids();
    cohort.measurements.retain(|m| !injected.contains(&m.id));
    for entry in std::mem::take(&mut cohort.truth_ledger) {
        if entry.kind == LedgerKind::InjectedIrrelevantComment {
            if let Some(i) = cohort.measurements.iter().position(|m| m.id == entry.injected_id) {
                cohort.measurements[i].comment = None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Messiness, SimulationConfig};
    use crate::domain::validate_cohort;
    use crate::sim::simulate;

    fn small(messiness: Messiness) -> Cohort {
        let config = SimulationConfig { n_patients: 4, duration_days: 40, messiness, ..Default::default() };
        simulate(&config)
    }

    #[test]
    fn injection_is_recorded_and_reversible() {
        let clean = small(Messiness { p_duplicate: 0.2, p_irrelevant_comment: 0.2, ..Default::default() });
        let mut messy = clean.clone();
        inject_messiness(&mut messy);
        assert!(messy.measurements.len() > clean.measurements.len());
        assert!(messy.truth_ledger.iter().any(|e| e.kind == LedgerKind::InjectedIrrelevantComment));
        assert!(validate_cohort(&messy).is_empty(), "{}", validate_cohort(&messy));

        let ledger_len = messy.truth_ledger.len();
        inject_messiness(&mut messy);
        assert_eq!(messy.truth_ledger.len(), ledger_len);

        strip_messiness(&mut messy);
        assert_eq!(messy, clean);
    }

    #[test]
    fn duplicates_stay_close_and_keep_the_value() {
        let mut cohort = small(Messiness { p_duplicate: 0.5, ..Default::default() });
        inject_messiness(&mut cohort);
        for entry in &cohort.truth_ledger {
            let copy = cohort.measurement(entry.injected_id).unwrap();
            let Some(orig) = entry.original_id else { continue };
            let orig = cohort.measurement(orig).unwrap();
            let gap = (copy.timestamp - orig.timestamp).num_seconds();
            assert!((1..=120).contains(&gap));
            assert_eq!((copy.vital, copy.value, copy.patient_id), (orig.vital, orig.value, orig.patient_id));
        }
    }

    #[test]
    fn zero_probabilities_inject_nothing() {
        let mut cohort = small(Messiness { p_duplicate: 0.0, p_irrelevant_comment: 0.0, ..Default::default() });
        let before = cohort.clone();
        inject_messiness(&mut cohort);
        assert_eq!(cohort, before);
    }
}
