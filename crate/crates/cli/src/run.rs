//! Orchestration: run a validated plan, then write its artifacts.

use std::path::Path;

use mfg_core::stationary::{iterate_stationary_with, projected_step};
use mfg_core::timedep::iterate_timedep_with;
use mfg_core::{DiagnosticsSink, IterationRecord};

use crate::config::Plan;
use crate::error::{CliError, Result};
use crate::output::{
    write_convergence, write_summary, Summary, TrajectoryTable, CONVERGENCE_FILE, SUMMARY_FILE, TRAJECTORY_FILE,
};

/// Everything a run produces, held in memory until it is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub records: Vec<IterationRecord>,
    /// Time-dependent runs: the solution on the grid. Stationary runs: the
    /// iterates, with `t` the pseudo-time `iter · step`.
    pub trajectory: TrajectoryTable,
    pub summary: Summary,
}

pub fn execute(plan: &Plan, sink: &mut dyn DiagnosticsSink) -> Result<Outcome> {
    match plan {
        Plan::Stationary { model, init, config } => {
            let sol = iterate_stationary_with(model, init, config, sink)?;
            let mut table = TrajectoryTable {
                times: Vec::with_capacity(sol.report.iterations + 1),
                theta: Vec::with_capacity(sol.report.iterations + 1),
                u: Vec::with_capacity(sol.report.iterations + 1),
            };
            let mut state = init.clone();
            for k in 0..=sol.report.iterations {
                if k > 0 {
                    state = projected_step(model, &state, config.step)?.0;
                }
                table.times.push(k as f64 * config.step);
                table.theta.push(state.theta.as_slice().to_vec());
                table.u.push(state.u.as_slice().to_vec());
            }
            let summary = Summary {
                converged: sol.converged(),
                iters: sol.report.iterations,
                final_residual: sol.report.final_residual,
                h1_distance: sol.report.final_distance,
                k_bar: Some(sol.k_bar),
                hamiltonian_std: None,
            };
            Ok(Outcome {
                records: sol.report.records,
                trajectory: table,
                summary,
            })
        }
        Plan::Timedep { model, init, config } => {
            let sol = iterate_timedep_with(model, init, config, sink)?;
            let summary = Summary {
                converged: sol.converged(),
                iters: sol.report.iterations,
                final_residual: sol.report.final_residual,
                h1_distance: sol.report.final_distance,
                k_bar: None,
                hamiltonian_std: sol.report.last().and_then(|r| r.hamiltonian_std),
            };
            Ok(Outcome {
                trajectory: TrajectoryTable::from_pair(&sol.solution),
                records: sol.report.records,
                summary,
            })
        }
    }
}

/// Writes `trajectory.csv`, `convergence.csv` and `summary.json` into `dir`,
/// creating it if needed.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    outcome.trajectory.write_csv(&dir.join(TRAJECTORY_FILE))?;
    write_convergence(&outcome.records, &dir.join(CONVERGENCE_FILE))?;
    write_summary(&outcome.summary, &dir.join(SUMMARY_FILE))
}

/// Prints every `every`-th record to stderr.
pub struct Progress {
    pub every: usize,
}

impl DiagnosticsSink for Progress {
    fn record(&mut self, r: &IterationRecord) {
        if self.every > 0 && r.iter.is_multiple_of(self.every) {
            let distance = r.distance.map_or_else(|| "-".to_string(), |d| format!("{d:.3e}"));
            eprintln!("iter {:>6}  residual {:.3e}  distance {distance}", r.iter, r.residual);
        }
    }
}
