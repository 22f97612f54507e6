//! Empirical harnesses: the Gaussian-process limit of wide random MPS and
//! fitting activated MPS to target functions.

pub mod fit;
pub mod gp;
pub mod stats;

pub use fit::{fit_activated_mps, grad_check, uniform_grid, FitConfig, FitRecord, ModelShape, OutputPath, Target};
pub use gp::{run_gp_experiment, variance_check, GpExperimentConfig, GpReport, VarianceCheck, WidthReport};
