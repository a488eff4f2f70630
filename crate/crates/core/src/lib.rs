//! Deterministic synthetic remote patient monitoring cohorts.
//!
//! A [`SimulationConfig`] fully determines a [`Cohort`]: patient and HCP
//! personas, daily vitals, alerts, HCP responses, medication changes,
//! admissions and consultations.

pub mod alert;
pub mod config;
pub mod dataset;
pub mod domain;
pub mod policy;
pub mod service;
pub mod sim;
pub mod stats;
pub mod verify;

pub use config::{ConfigError, SimulationConfig};
pub use domain::Cohort;
pub use sim::simulate;
