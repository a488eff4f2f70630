//! Simulation configuration.
//!
//! A config file is TOML with a mandatory `config_version = 1` line; every
//! other key is optional and falls back to the defaults below. The defaults
//! are calibration constants: with them a 10-patient, 6-HCP, 180-day cohort
//! raises alerts on roughly 13% of measurements.
//!
//! ```toml
//! config_version = 1
//! n_patients = 10
//! n_hcps = 6
//! duration_days = 180
//! seed = 42
//! mode = "batch"
//!
//! [noise_amplitude.fluctuating]
//! weight = 0.75
//! systolic_bp = 7.0
//! diastolic_bp = 5.0
//! heart_rate = 6.0
//!
//! [messiness]
//! p_duplicate = 0.03
//! ```

use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::domain::{wire_enum, StabilityClass, Vital, VitalMap};

pub const CONFIG_VERSION: u32 = 1;

wire_enum!(Mode, "mode" {
    Batch => "batch",
    Interactive => "interactive",
});

/// Inclusive `[min, max]` range; written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(T, T)", into = "(T, T)")]
pub struct Span<T: Copy> {
    pub min: T,
    pub max: T,
}

impl<T: Copy> Span<T> {
    pub const fn new(min: T, max: T) -> Self {
        Span { min, max }
    }
}

impl<T: Copy> From<(T, T)> for Span<T> {
    fn from((min, max): (T, T)) -> Self {
        Span { min, max }
    }
}

impl<T: Copy> From<Span<T>> for (T, T) {
    fn from(s: Span<T>) -> Self {
        (s.min, s.max)
    }
}

/// Per-vital noise standard deviation for each stability class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseAmplitude {
    pub stable: VitalMap<f64>,
    pub fluctuating: VitalMap<f64>,
    pub spiky: VitalMap<f64>,
}

impl NoiseAmplitude {
    pub fn get(&self, class: StabilityClass, vital: Vital) -> f64 {
        let map = match class {
            StabilityClass::Stable => &self.stable,
            StabilityClass::Fluctuating => &self.fluctuating,
            StabilityClass::Spiky => &self.spiky,
        };
        *map.get(vital)
    }

    pub fn zero() -> Self {
        let z = VitalMap::from_fn(|_| 0.0);
        NoiseAmplitude { stable: z, fluctuating: z, spiky: z }
    }
}

impl Default for NoiseAmplitude {
    fn default() -> Self {
        NoiseAmplitude {
            stable: VitalMap { weight: 0.8, systolic_bp: 7.5, diastolic_bp: 5.5, heart_rate: 6.0 },
            fluctuating: VitalMap { weight: 1.1, systolic_bp: 10.5, diastolic_bp: 7.5, heart_rate: 8.5 },
            spiky: VitalMap { weight: 0.85, systolic_bp: 8.0, diastolic_bp: 6.0, heart_rate: 6.5 },
        }
    }
}

/// Transient decompensation episodes of spiky patients. While a spike is
/// active every vital is raised by the spike's drawn magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpikeConfig {
    /// Expected number of spike onsets per 30 days.
    pub rate_per_30_days: f64,
    pub magnitude: VitalMap<Span<f64>>,
    pub duration_days: Span<u32>,
}

impl Default for SpikeConfig {
    fn default() -> Self {
        SpikeConfig {
            rate_per_30_days: 1.0,
            magnitude: VitalMap {
                weight: Span::new(1.5, 3.5),
                systolic_bp: Span::new(8.0, 20.0),
                diastolic_bp: Span::new(4.0, 10.0),
                heart_rate: Span::new(8.0, 20.0),
            },
            duration_days: Span::new(2, 5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmissionPolicy {
    /// High-severity alerts needed within `window_days` to admit.
    pub trigger_high_alerts: u32,
    pub window_days: u32,
    pub stay_days: Span<u32>,
}

impl Default for AdmissionPolicy {
    fn default() -> Self {
        AdmissionPolicy { trigger_high_alerts: 3, window_days: 7, stay_days: Span::new(3, 10) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Messiness {
    pub p_duplicate: f64,
    pub p_irrelevant_comment: f64,
    pub p_situated_comment: f64,
}

impl Default for Messiness {
    fn default() -> Self {
        Messiness { p_duplicate: 0.03, p_irrelevant_comment: 0.02, p_situated_comment: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub config_version: u32,
    pub n_patients: u32,
    pub n_hcps: u32,
    pub duration_days: u32,
    pub seed: u64,
    pub mode: Mode,
    /// First simulated day; also every patient's enrollment date.
    pub start_date: NaiveDate,
    pub noise_amplitude: NoiseAmplitude,
    pub spike: SpikeConfig,
    pub abrupt_delta: VitalMap<f64>,
    pub abrupt_window_days: u32,
    /// How far past a threshold a value must be for a high-severity alert.
    pub escalation_margin: VitalMap<f64>,
    pub admission_policy: AdmissionPolicy,
    pub admission_adherence_multiplier: f64,
    pub messiness: Messiness,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            config_version: CONFIG_VERSION,
            n_patients: 10,
            n_hcps: 6,
            duration_days: 180,
            seed: 42,
            mode: Mode::Batch,
            start_date: NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date"),
            noise_amplitude: NoiseAmplitude::default(),
            spike: SpikeConfig::default(),
            abrupt_delta: VitalMap { weight: 1.6, systolic_bp: 17.0, diastolic_bp: 12.0, heart_rate: 14.0 },
            abrupt_window_days: 3,
            escalation_margin: VitalMap { weight: 1.0, systolic_bp: 10.0, diastolic_bp: 6.0, heart_rate: 10.0 },
            admission_policy: AdmissionPolicy::default(),
            admission_adherence_multiplier: 0.1,
            messiness: Messiness::default(),
        }
    }
}

/// A problem with one named config field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("unsupported config_version {0} (expected {CONFIG_VERSION})")]
    Version(u32),
    #[error("invalid config: {}", join_fields(.0))]
    Invalid(Vec<FieldError>),
}

impl ConfigError {
    /// Names of the offending fields, when known.
    pub fn fields(&self) -> Vec<String> {
        match self {
            ConfigError::Invalid(errors) => errors.iter().map(|e| e.field.clone()).collect(),
            ConfigError::Version(_) => vec!["config_version".to_owned()],
            _ => Vec::new(),
        }
    }
}

fn join_fields(errors: &[FieldError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

impl SimulationConfig {
    /// Parses TOML text. `config_version` must be present.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        if !table.contains_key("config_version") {
            return Err(ConfigError::Invalid(vec![FieldError {
                field: "config_version".into(),
                message: "missing".into(),
            }]));
        }
        let de = toml::de::Deserializer::parse(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let config: SimulationConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            ConfigError::Invalid(vec![FieldError {
                field: e.path().to_string(),
                message: e.inner().message().to_owned(),
            }])
        })?;
        config.validated()
    }

    pub fn from_toml_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Parses a JSON object; missing fields take their defaults.
    pub fn from_json_value(value: serde_json::Value) -> Result<Self, ConfigError> {
        let config: SimulationConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            ConfigError::Invalid(vec![FieldError { field: e.path().to_string(), message: e.inner().to_string() }])
        })?;
        config.validated()
    }

    pub fn validated(self) -> Result<Self, ConfigError> {
        if self.config_version != CONFIG_VERSION {
            return Err(ConfigError::Version(self.config_version));
        }
        let errors = self.check();
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }

    /// Range checks on every field; empty when the config is usable.
    pub fn check(&self) -> Vec<FieldError> {
        let mut errors = Vec::new();
        let mut err = |field: String, message: &str| errors.push(FieldError { field, message: message.to_owned() });
        let probability = |x: f64| (0.0..=1.0).contains(&x);

        for (name, p) in [
            ("messiness.p_duplicate", self.messiness.p_duplicate),
            ("messiness.p_irrelevant_comment", self.messiness.p_irrelevant_comment),
            ("messiness.p_situated_comment", self.messiness.p_situated_comment),
            ("admission_adherence_multiplier", self.admission_adherence_multiplier),
        ] {
            if !probability(p) {
                err(name.to_owned(), "must be a probability in [0, 1]");
            }
        }
        for class in StabilityClass::ALL {
            for &vital in Vital::ALL {
                let amp = self.noise_amplitude.get(*class, vital);
                if !(amp >= 0.0 && amp.is_finite()) {
                    err(format!("noise_amplitude.{class}.{vital}"), "must be finite and >= 0");
                }
            }
        }
        for (vital, delta) in self.abrupt_delta.iter() {
            if !(*delta > 0.0 && delta.is_finite()) {
                err(format!("abrupt_delta.{vital}"), "must be > 0");
            }
        }
        for (vital, margin) in self.escalation_margin.iter() {
            if !(*margin >= 0.0 && margin.is_finite()) {
                err(format!("escalation_margin.{vital}"), "must be >= 0");
            }
        }
        if self.abrupt_window_days < 1 {
            err("abrupt_window_days".into(), "must be >= 1");
        }
        if !(self.spike.rate_per_30_days >= 0.0 && self.spike.rate_per_30_days <= 30.0) {
            err("spike.rate_per_30_days".into(), "must be in [0, 30]");
        }
        for (vital, span) in self.spike.magnitude.iter() {
            if !(span.min >= 0.0 && span.min <= span.max && span.max.is_finite()) {
                err(format!("spike.magnitude.{vital}"), "must satisfy 0 <= min <= max");
            }
        }
        let stays = self.spike.duration_days;
        if stays.min < 1 || stays.min > stays.max {
            err("spike.duration_days".into(), "must satisfy 1 <= min <= max");
        }
        let policy = self.admission_policy;
        if policy.trigger_high_alerts < 1 {
            err("admission_policy.trigger_high_alerts".into(), "must be >= 1");
        }
        if policy.window_days < 1 {
            err("admission_policy.window_days".into(), "must be >= 1");
        }
        if policy.stay_days.min < 1 || policy.stay_days.min > policy.stay_days.max {
            err("admission_policy.stay_days".into(), "must satisfy 1 <= min <= max");
        }
        errors
    }
}

impl std::str::FromStr for SimulationConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_toml_str(s)
    }
}
