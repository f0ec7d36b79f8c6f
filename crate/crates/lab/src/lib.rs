//! Experiment runner on top of `stablab-core`: seeded state families,
//! per-case checks collected into a [`report::Report`], and deterministic
//! CSV/JSON/gnuplot output.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{Experiment, ExperimentConfig, Family, Unit};
pub use error::{LabError, Result};
pub use experiments::run;
pub use report::{Report, Row, Verdict};
