//! Experiment runner for the finite-state mean-field game solvers: JSON
//! configs in, CSV traces and a JSON summary out.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Plan, RunConfig};
pub use error::{CliError, Result};
pub use output::{Summary, TrajectoryTable};
pub use run::{execute, write_outputs, Outcome};
