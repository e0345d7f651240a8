//! Scenario driver for the braiding simulator: strict JSON configs in,
//! CSV tables and a JSON summary out.

pub mod config;
pub mod report;
pub mod scenario;

pub use config::{expand, RunConfig, ScenarioKind, Sweep, Variant};
pub use report::{Check, CheckKind, Outcome, Summary};
pub use scenario::run;
