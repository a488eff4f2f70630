#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::*;

wire_enum!(EntityKind, "entity kind" {
    Patient => "patient",
    Hcp => "hcp",
    Measurement => "measurement",
    Alert => "alert",
    Response => "response",
    MedicationChange => "medication_change",
    Admission => "admission",
    Consultation => "consultation",
    TruthLedger => "truth_ledger",
});

wire_enum!(ViolationKind, "violation kind" {
    DanglingReference => "dangling_reference",
    CausalOrder => "causal_order",
    InvalidValue => "invalid_value",
    DuplicateId => "duplicate_id",
    ResponseCardinality => "response_cardinality",
    AdmissionOverlap => "admission_overlap",
    ChannelMismatch => "channel_mismatch",
    LedgerIntegrity => "ledger_integrity",
});

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::DanglingReference => "dangling reference",
            ViolationKind::CausalOrder => "causal order",
            ViolationKind::InvalidValue => "invalid value",
            ViolationKind::DuplicateId => "duplicate id",
            ViolationKind::ResponseCardinality => "response cardinality",
            ViolationKind::AdmissionOverlap => "admission overlap",
            ViolationKind::ChannelMismatch => "channel mismatch",
            ViolationKind::LedgerIntegrity => "ledger integrity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub entity: EntityKind,
    pub id: String,
    #[serde(skip)]
    index: u32,
    pub kind: ViolationKind,
    /// Other ids involved, e.g. the missing target of a reference.
    pub related: Vec<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {}: {}", self.kind.label(), self.entity, self.id, self.message)
    }
}

/// Every broken invariant found in a cohort, ordered by (entity kind, id).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn kinds(&self) -> Vec<ViolationKind> {
        self.violations.iter().map(|v| v.kind).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Collector {
    out: Vec<Violation>,
}

impl Collector {
    fn push(
        &mut self,
        entity: EntityKind,
        id: impl fmt::Display,
        index: u32,
        kind: ViolationKind,
        related: Vec<String>,
        message: String,
    ) {
        self.out.push(Violation { entity, id: id.to_string(), index, kind, related, message });
    }

    fn duplicates<I: Copy + Eq + std::hash::Hash + fmt::Display>(
        &mut self,
        entity: EntityKind,
        ids: impl Iterator<Item = (I, u32)>,
    ) {
        let mut seen = HashSet::new();
        for (id, index) in ids {
            if !seen.insert(id) {
                self.push(
                    entity,
                    id,
                    index,
                    ViolationKind::DuplicateId,
                    vec![],
                    format!("id {id} appears more than once"),
                );
            }
        }
    }

    fn dangling(
        &mut self,
        entity: EntityKind,
        id: impl fmt::Display,
        index: u32,
        target: impl fmt::Display,
        what: &str,
    ) {
        self.push(
            entity,
            &id,
            index,
            ViolationKind::DanglingReference,
            vec![target.to_string()],
            format!("references missing {what} {target}"),
        );
    }
}

fn in_unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Checks every type invariant and cross-entity rule of a cohort.
///
/// Violations are data: an empty report means the cohort is consistent.
pub fn validate_cohort(cohort: &Cohort) -> ValidationReport {
    let mut c = Collector { out: Vec::new() };

    let patients: HashMap<PatientId, &PatientProfile> = cohort.patients.iter().map(|p| (p.id, p)).collect();
    let hcps: HashSet<HcpId> = cohort.hcps.iter().map(|h| h.id).collect();
    let measurements: HashMap<MeasurementId, &Measurement> = cohort.measurements.iter().map(|m| (m.id, m)).collect();
    let alerts: HashMap<AlertId, &Alert> = cohort.alerts.iter().map(|a| (a.id, a)).collect();

    c.duplicates(EntityKind::Patient, cohort.patients.iter().map(|p| (p.id, p.id.0)));
    for p in &cohort.patients {
        let mut bad = Vec::new();
        if !in_unit_interval(p.adherence) {
            bad.push(format!("adherence {} outside [0, 1]", p.adherence));
        }
        if !(18..=110).contains(&p.age) {
            bad.push(format!("age {} outside [18, 110]", p.age));
        }
        for (vital, t) in p.thresholds.iter() {
            // Written as a negation so NaN limits are flagged too.
            if !(t.low < t.high) {
                bad.push(format!("{vital} threshold low {} not below high {}", t.low, t.high));
            }
            let base = *p.baselines.get(vital);
            if !(t.low < base && base < t.high) {
                bad.push(format!("{vital} baseline {base} not inside ({}, {})", t.low, t.high));
            }
        }
        for msg in bad {
            c.push(EntityKind::Patient, p.id, p.id.0, ViolationKind::InvalidValue, vec![], msg);
        }
    }

    c.duplicates(EntityKind::Hcp, cohort.hcps.iter().map(|h| (h.id, h.id.0)));
    for h in &cohort.hcps {
        if !in_unit_interval(h.confidence) {
            c.push(
                EntityKind::Hcp,
                h.id,
                h.id.0,
                ViolationKind::InvalidValue,
                vec![],
                format!("confidence {} outside [0, 1]", h.confidence),
            );
        }
        if h.duty_days.is_empty() {
            c.push(EntityKind::Hcp, h.id, h.id.0, ViolationKind::InvalidValue, vec![], "no duty days".to_owned());
        }
    }

    c.duplicates(EntityKind::Measurement, cohort.measurements.iter().map(|m| (m.id, m.id.0)));
    for m in &cohort.measurements {
        let (ek, idx) = (EntityKind::Measurement, m.id.0);
        if !(m.value > 0.0) {
            c.push(ek, m.id, idx, ViolationKind::InvalidValue, vec![], format!("value {} not positive", m.value));
        }
        match patients.get(&m.patient_id) {
            None => c.dangling(ek, m.id, idx, m.patient_id, "patient"),
            Some(p) => {
                if m.timestamp.date() < p.enrollment_date {
                    c.push(
                        ek,
                        m.id,
                        idx,
                        ViolationKind::CausalOrder,
                        vec![p.id.to_string()],
                        format!("taken before enrollment on {}", p.enrollment_date),
                    );
                }
            }
        }
    }

    c.duplicates(EntityKind::Alert, cohort.alerts.iter().map(|a| (a.id, a.id.0)));
    for a in &cohort.alerts {
        let (ek, idx) = (EntityKind::Alert, a.id.0);
        if !patients.contains_key(&a.patient_id) {
            c.dangling(ek, a.id, idx, a.patient_id, "patient");
        }
        match measurements.get(&a.measurement_id) {
            None => c.dangling(ek, a.id, idx, a.measurement_id, "measurement"),
            Some(m) => {
                if m.patient_id != a.patient_id {
                    c.push(
                        ek,
                        a.id,
                        idx,
                        ViolationKind::DanglingReference,
                        vec![m.id.to_string()],
                        format!("measurement {} belongs to {}, not {}", m.id, m.patient_id, a.patient_id),
                    );
                }
                if a.created_at < m.timestamp {
                    c.push(
                        ek,
                        a.id,
                        idx,
                        ViolationKind::CausalOrder,
                        vec![m.id.to_string()],
                        format!(
                            "created at {} before its measurement at {}",
                            utc::format(&a.created_at),
                            utc::format(&m.timestamp)
                        ),
                    );
                }
            }
        }
        if a.rules.is_empty() {
            c.push(ek, a.id, idx, ViolationKind::InvalidValue, vec![], "empty rule set".to_owned());
        }
        if let Some(h) = a.assigned_hcp_id {
            if !hcps.contains(&h) {
                c.dangling(ek, a.id, idx, h, "hcp");
            }
        }
    }

    c.duplicates(EntityKind::Response, cohort.responses.iter().map(|r| (r.id, r.id.0)));
    let mut terminal: BTreeMap<AlertId, usize> = BTreeMap::new();
    for r in &cohort.responses {
        let (ek, idx) = (EntityKind::Response, r.id.0);
        if !hcps.contains(&r.hcp_id) {
            c.dangling(ek, r.id, idx, r.hcp_id, "hcp");
        }
        match alerts.get(&r.alert_id) {
            None => c.dangling(ek, r.id, idx, r.alert_id, "alert"),
            Some(a) => {
                if r.timestamp < a.created_at {
                    c.push(
                        ek,
                        r.id,
                        idx,
                        ViolationKind::CausalOrder,
                        vec![a.id.to_string()],
                        format!(
                            "recorded at {} before alert {} was created at {}",
                            utc::format(&r.timestamp),
                            a.id,
                            utc::format(&a.created_at)
                        ),
                    );
                }
                if r.action.is_terminal() {
                    *terminal.entry(a.id).or_default() += 1;
                }
            }
        }
    }
    for a in &cohort.alerts {
        let count = terminal.get(&a.id).copied().unwrap_or(0);
        let expected = match a.status {
            AlertStatus::Resolved => 1,
            AlertStatus::Open => 0,
        };
        if count != expected {
            c.push(
                EntityKind::Alert,
                a.id,
                a.id.0,
                ViolationKind::ResponseCardinality,
                vec![],
                format!("{} alert has {count} terminal responses, expected {expected}", a.status),
            );
        }
    }

    c.duplicates(EntityKind::MedicationChange, cohort.medication_changes.iter().map(|m| (m.id, m.id.0)));
    for mc in &cohort.medication_changes {
        let (ek, idx) = (EntityKind::MedicationChange, mc.id.0);
        match patients.get(&mc.patient_id) {
            None => c.dangling(ek, mc.id, idx, mc.patient_id, "patient"),
            Some(p) if mc.timestamp.date() < p.enrollment_date => {
                c.push(
                    ek,
                    mc.id,
                    idx,
                    ViolationKind::CausalOrder,
                    vec![p.id.to_string()],
                    format!("recorded before enrollment on {}", p.enrollment_date),
                );
            }
            Some(_) => {}
        }
        if !(mc.effect.magnitude > 0.0) {
            c.push(
                ek,
                mc.id,
                idx,
                ViolationKind::InvalidValue,
                vec![],
                format!("effect magnitude {} not positive", mc.effect.magnitude),
            );
        }
        if mc.effect.onset_days < 1 {
            c.push(ek, mc.id, idx, ViolationKind::InvalidValue, vec![], "onset_days below 1".to_owned());
        }
    }

    c.duplicates(EntityKind::Admission, cohort.admissions.iter().map(|a| (a.id, a.id.0)));
    let mut by_patient: BTreeMap<PatientId, Vec<&Admission>> = BTreeMap::new();
    for adm in &cohort.admissions {
        let (ek, idx) = (EntityKind::Admission, adm.id.0);
        if !patients.contains_key(&adm.patient_id) {
            c.dangling(ek, adm.id, idx, adm.patient_id, "patient");
        }
        if adm.start >= adm.end {
            c.push(
                ek,
                adm.id,
                idx,
                ViolationKind::InvalidValue,
                vec![],
                format!("start {} not before end {}", adm.start, adm.end),
            );
        }
        by_patient.entry(adm.patient_id).or_default().push(adm);
    }
    for stays in by_patient.values_mut() {
        stays.sort_by_key(|a| (a.start, a.id));
        for pair in stays.windows(2) {
            if pair[1].start < pair[0].end {
                c.push(
                    EntityKind::Admission,
                    pair[1].id,
                    pair[1].id.0,
                    ViolationKind::AdmissionOverlap,
                    vec![pair[0].id.to_string()],
                    format!("overlaps admission {}", pair[0].id),
                );
            }
        }
    }

    c.duplicates(EntityKind::Consultation, cohort.consultations.iter().map(|x| (x.id, x.id.0)));
    for con in &cohort.consultations {
        let (ek, idx) = (EntityKind::Consultation, con.id.0);
        if !patients.contains_key(&con.patient_id) {
            c.dangling(ek, con.id, idx, con.patient_id, "patient");
        }
        if !hcps.contains(&con.hcp_id) {
            c.dangling(ek, con.id, idx, con.hcp_id, "hcp");
        }
        let admitted =
            by_patient.get(&con.patient_id).is_some_and(|stays| stays.iter().any(|a| a.covers_instant(con.timestamp)));
        match (con.channel, admitted) {
            (Channel::InPerson, false) => c.push(
                ek,
                con.id,
                idx,
                ViolationKind::ChannelMismatch,
                vec![],
                "in-person consultation outside any admission".to_owned(),
            ),
            (Channel::Phone, true) => c.push(
                ek,
                con.id,
                idx,
                ViolationKind::ChannelMismatch,
                vec![],
                "phone consultation during an admission".to_owned(),
            ),
            _ => {}
        }
    }

    for (n, entry) in cohort.truth_ledger.iter().enumerate() {
        let idx = n as u32;
        let id = format!("#{n}");
        if !measurements.contains_key(&entry.injected_id) {
            c.push(
                EntityKind::TruthLedger,
                &id,
                idx,
                ViolationKind::LedgerIntegrity,
                vec![entry.injected_id.to_string()],
                format!("injected measurement {} does not exist", entry.injected_id),
            );
        }
        if let Some(orig) = entry.original_id {
            if orig == entry.injected_id || !measurements.contains_key(&orig) {
                c.push(
                    EntityKind::TruthLedger,
                    &id,
                    idx,
                    ViolationKind::LedgerIntegrity,
                    vec![orig.to_string()],
                    format!("original measurement {orig} missing or identical to the injected one"),
                );
            }
        }
    }

    let mut violations = c.out;
    violations.sort_by(|a, b| (a.entity, a.index, a.kind, &a.message).cmp(&(b.entity, b.index, b.kind, &b.message)));
    ValidationReport { violations }
}
