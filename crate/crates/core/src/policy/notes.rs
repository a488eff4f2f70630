//! Documentation-style note rendering. Terse HCPs write at most twelve
//! words; verbose ones write at least twenty-five. Both always name the
//! vital and its value when the event concerns a measurement.

use serde::Serialize;

use crate::domain::{DocStyle, HcpProfile, MedicationChangeKind, ResponseAction, Severity, Vital};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteSubject {
    /// Note attached to an alert response.
    Response(ResponseAction),
    /// Consultation text for a phone call to the patient.
    PhoneCall,
    /// Consultation text for a bedside visit during an admission.
    WardVisit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoteEvent {
    pub subject: NoteSubject,
    pub reading: Option<(Vital, f64)>,
    pub severity: Option<Severity>,
    pub medication: Option<(String, MedicationChangeKind)>,
    /// Picks between template variants; usually the alert or admission id.
    pub variant: u32,
}

fn reading_text(reading: Option<(Vital, f64)>) -> String {
    match reading {
        Some((vital, value)) => format!("{} {} {}", vital.label(), vital.format_value(value), vital.unit()),
        None => "vitals".to_owned(),
    }
}

fn medication_text(medication: &Option<(String, MedicationChangeKind)>) -> String {
    match medication {
        Some((drug, change)) => format!("{drug} {change}"),
        None => "medication review".to_owned(),
    }
}

fn terse(event: &NoteEvent) -> String {
    let r = reading_text(event.reading);
    let alt = event.variant % 2 == 1;
    match event.subject {
        NoteSubject::Response(ResponseAction::Dismiss) if alt => format!("{r} noted, no action."),
        NoteSubject::Response(ResponseAction::Dismiss) => format!("Reviewed {r}. Dismissed."),
        NoteSubject::Response(ResponseAction::CallPatient) => format!("Called pt re {r}."),
        NoteSubject::Response(ResponseAction::AdjustMedication) => {
            format!("{r}: {}.", medication_text(&event.medication))
        }
        NoteSubject::Response(ResponseAction::ContactColleague) => format!("{r}, asked colleague."),
        NoteSubject::PhoneCall if alt => format!("Phone: {r}, advice given."),
        NoteSubject::PhoneCall => format!("Phoned pt, {r}, plan agreed."),
        NoteSubject::WardVisit => format!("Ward visit. {r} reviewed, admitted."),
    }
}

fn verbose(event: &NoteEvent) -> String {
    let r = reading_text(event.reading);
    let severity = match event.severity {
        Some(Severity::High) => "a high-severity",
        Some(Severity::Mild) => "a mild",
        None => "an",
    };
    let alt = event.variant % 2 == 1;
    match event.subject {
        NoteSubject::Response(ResponseAction::Dismiss) if alt => format!(
            "Looked at {severity} alert for {r} together with the recent trend. The value fits the known pattern \
             for this patient, so no follow-up is needed at this time."
        ),
        NoteSubject::Response(ResponseAction::Dismiss) => format!(
            "Reviewed {severity} alert for {r}. Compared with the previous days this looks like normal variation \
             for this patient, so I dismissed the alert without further action."
        ),
        NoteSubject::Response(ResponseAction::CallPatient) => format!(
            "Received {severity} alert for {r}. I decided to call the patient to ask about symptoms, fluid intake \
             and medication use before deciding on any further steps."
        ),
        NoteSubject::Response(ResponseAction::AdjustMedication) => format!(
            "Repeated alerts for this patient, latest {r}. After reviewing the trend of the last week I arranged a \
             change: {}. Will keep monitoring the coming days.",
            medication_text(&event.medication)
        ),
        NoteSubject::Response(ResponseAction::ContactColleague) => format!(
            "Unsure how to interpret {severity} alert for {r}. I forwarded the case to a colleague for a second \
             opinion before taking any action with the patient."
        ),
        NoteSubject::PhoneCall if alt => format!(
            "Phoned the patient about {r}. We went through symptoms, daily weight and medication intake, and agreed \
             to stay in touch if anything changes."
        ),
        NoteSubject::PhoneCall => format!(
            "Telephone consultation about {r}. Patient was reachable, explained the readings and agreed to measure \
             again tomorrow and to call us if symptoms get worse."
        ),
        NoteSubject::WardVisit => format!(
            "Visited the patient on the ward after admission. Discussed the recent {r} readings, the plan for the \
             coming days and what will change after discharge."
        ),
    }
}

/// Renders a note in the HCP's documentation style. Deterministic.
pub fn render_note(hcp: &HcpProfile, event: &NoteEvent) -> String {
    match hcp.doc_style {
        DocStyle::Terse => terse(event),
        DocStyle::Verbose => verbose(event),
    }
}
