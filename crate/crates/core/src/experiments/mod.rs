//! Experiment drivers and the config-driven runner.

pub mod claim;
pub mod config;
pub mod density;
pub mod disconnected;
pub mod poisson;
pub mod runner;

pub use claim::{claim_pipeline, ClaimReport};
pub use config::{Experiment, ExperimentConfig};
pub use density::{density_sweep, DensityRow};
pub use disconnected::{disconnected_spectrum_demo, search_witness, DisconnectedReport};
pub use poisson::{poisson_sum_check, PoissonReport};
pub use runner::{fmt_float, run, Check, Manifest};
