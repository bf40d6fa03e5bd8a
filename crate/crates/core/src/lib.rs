//! Agent-based simulation of misinformation spreading through a synthetic
//! social network whose feeds are curated by one of five recommendation
//! strategies.
//!
//! The crate is organised bottom-up:
//!
//! - [`domain`]: value types, configuration and seeded randomness
//! - [`netgen`]: agent population and follow graph
//! - [`content`]: content catalog, engagement decay and evaluation
//! - [`recsys`]: random, popularity, user-kNN, item-kNN and content-based recommenders
//! - [`engine`]: the step loop and the susceptible/exposed/infected state machine
//! - [`metrics`]: MSP, MRD and MC per step and per run
//! - [`expcli`]: batch experiments, CSV output and the command line

pub mod content;
pub mod domain;
pub mod engine;
mod error;
pub mod expcli;
pub mod metrics;
pub mod netgen;
pub mod recsys;

pub use domain::{Algorithm, SimulationConfig};
pub use engine::{run, SimulationModel};
pub use error::{Error, Result};
pub use metrics::{RunSummary, StepMetricsRow};
