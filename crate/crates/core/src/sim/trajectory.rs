//! Per-patient value model: baseline, medication effects, spikes and noise.

use chrono::{Duration, NaiveDate};
use rand::Rng;

use super::rng::{stream, Purpose};
use crate::config::SimulationConfig;
use crate::domain::{MedicationEffect, PatientProfile, StabilityClass, Vital, VitalMap};

/// A transient episode that raises every vital while it lasts.
#[derive(Debug, Clone, PartialEq)]
pub struct Spike {
    pub start: NaiveDate,
    pub duration_days: u32,
    pub magnitude: VitalMap<f64>,
}

impl Spike {
    pub fn active_on(&self, date: NaiveDate) -> bool {
        date >= self.start && date < self.start + Duration::days(i64::from(self.duration_days))
    }
}

/// A medication effect together with the date it was prescribed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveEffect {
    pub since: NaiveDate,
    pub effect: MedicationEffect,
}

/// Everything needed to produce a patient's next values.
#[derive(Debug, Clone)]
pub struct PatientState<'a> {
    pub profile: &'a PatientProfile,
    pub noise_amplitude: VitalMap<f64>,
    pub effects: Vec<ActiveEffect>,
    pub spikes: &'a [Spike],
    pub admitted: bool,
}

/// The spike episodes of one patient over the whole run. Only spiky
/// patients have any; onsets arrive at `rate_per_30_days / 30` per day and
/// never overlap.
pub fn spike_schedule(config: &SimulationConfig, profile: &PatientProfile) -> Vec<Spike> {
    if profile.stability_class != StabilityClass::Spiky || config.spike.rate_per_30_days <= 0.0 {
        return Vec::new();
    }
    let mut rng = stream(config.seed, Purpose::Spikes, u64::from(profile.id.0), 0);
    let p_onset = (config.spike.rate_per_30_days / 30.0).min(1.0);
    let mut spikes = Vec::new();
    let mut day = 0;
    while day < config.duration_days {
        if rng.random_bool(p_onset) {
            let span = config.spike.duration_days;
            let duration_days = rng.random_range(span.min..=span.max);
            let magnitude = config.spike.magnitude.map(|_, s| rng.random_range(s.min..=s.max));
            spikes.push(Spike { start: config.start_date + Duration::days(i64::from(day)), duration_days, magnitude });
            day += duration_days;
        } else {
            day += 1;
        }
    }
    spikes
}

/// Baseline plus every active contribution plus scaled noise, kept above
/// the vital's physiologic floor. `noise_draw` is a standard-normal draw.
pub fn next_value(state: &PatientState<'_>, vital: Vital, date: NaiveDate, noise_draw: f64) -> f64 {
    let baseline = *state.profile.baselines.get(vital);
    let medication: f64 = state
        .effects
        .iter()
        .filter(|e| e.effect.vital == vital)
        .map(|e| e.effect.contribution((date - e.since).num_days()))
        .sum();
    let spikes: f64 = state.spikes.iter().filter(|s| s.active_on(date)).map(|s| *s.magnitude.get(vital)).sum();
    let noise = noise_draw * *state.noise_amplitude.get(vital);
    (baseline + medication + spikes + noise).max(vital.floor())
}
