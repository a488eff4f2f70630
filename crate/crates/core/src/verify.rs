//! Offline checks of an exported bundle.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::alert::{key_set, scan, AlertKey, AlertRuleParams};
use crate::dataset::{self, Bundle, DatasetError};
use crate::domain::Cohort;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn describe(keys: &BTreeSet<AlertKey>, limit: usize) -> String {
    let shown: Vec<String> = keys
        .iter()
        .take(limit)
        .map(|k| format!("{}/{} [{}]", k.patient_id, k.measurement_id, crate::domain::format_rules(&k.rules)))
        .collect();
    let more = keys.len().saturating_sub(limit);
    if more > 0 {
        format!("{} and {more} more", shown.join(", "))
    } else {
        shown.join(", ")
    }
}

/// Rescans the measurements (minus injected duplicates) and compares the
/// result with the stored alerts.
pub fn oracle_check(cohort: &Cohort) -> Check {
    let params = AlertRuleParams::from(&cohort.config);
    let rescan: BTreeSet<AlertKey> =
        scan(&cohort.measurements, &cohort.patients, &params, &cohort.injected_measurement_ids())
            .iter()
            .map(|d| d.key())
            .collect();
    let stored = key_set(&cohort.alerts);
    if rescan == stored {
        return Check { name: "oracle", passed: true, detail: format!("{} alerts reproduced by rescan", stored.len()) };
    }
    let missing: BTreeSet<_> = rescan.difference(&stored).cloned().collect();
    let extra: BTreeSet<_> = stored.difference(&rescan).cloned().collect();
    let mut detail = String::from("oracle mismatch:");
    if !extra.is_empty() {
        detail += &format!(" stored but not rescanned: {};", describe(&extra, 5));
    }
    if !missing.is_empty() {
        detail += &format!(" rescanned but not stored: {};", describe(&missing, 5));
    }
    Check { name: "oracle", passed: false, detail: detail.trim_end_matches(';').to_owned() }
}

/// Re-renders the cohort and compares every file byte for byte.
pub fn round_trip_check(bundle: &Bundle, cohort: &Cohort) -> Check {
    match dataset::render(cohort) {
        Ok(again) if &again == bundle => {
            Check { name: "round_trip", passed: true, detail: "re-export is byte-identical".into() }
        }
        Ok(again) => {
            let differing: Vec<&str> =
                dataset::ALL_FILES.iter().copied().filter(|name| again.get(name) != bundle.get(name)).collect();
            Check {
                name: "round_trip",
                passed: false,
                detail: format!("re-export differs in {}", differing.join(", ")),
            }
        }
        Err(e) => Check { name: "round_trip", passed: false, detail: e.to_string() },
    }
}

/// Imports the bundle in `dir` and runs every check. Import failures are
/// returned as errors; check failures are in the report.
pub fn verify_bundle(dir: &Path) -> Result<VerifyReport, DatasetError> {
    let bundle = Bundle::read_from(dir)?;
    let cohort = bundle.parse()?;
    let mut checks = vec![Check {
        name: "validation",
        passed: true,
        detail: format!(
            "{} measurements, {} alerts, {} responses without violations",
            cohort.measurements.len(),
            cohort.alerts.len(),
            cohort.responses.len()
        ),
    }];
    checks.push(oracle_check(&cohort));
    checks.push(round_trip_check(&bundle, &cohort));
    Ok(VerifyReport { checks })
}
