//! CSV and JSON artifacts. Floats are written in Rust's shortest
//! round-trip form, so parsing them back is exact.

use std::fs::File;
use std::path::Path;

use mfg_core::{IterationRecord, SimplexVector, TimeGrid, TrajectoryPair, ValueVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const SUMMARY_FILE: &str = "summary.json";

const CONVERGENCE_HEADER: [&str; 6] = [
    "iter",
    "deformation_norm",
    "h1_distance",
    "hamiltonian_mean",
    "hamiltonian_std",
    "min_theta",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub converged: bool,
    pub iters: usize,
    pub final_residual: f64,
    pub h1_distance: Option<f64>,
    pub k_bar: Option<f64>,
    pub hamiltonian_std: Option<f64>,
}

/// One row per time node (or per iterate, for stationary runs).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn from_pair(traj: &TrajectoryPair) -> Self {
        let grid = traj.grid();
        let nodes = grid.nodes();
        TrajectoryTable {
            times: (0..nodes).map(|n| grid.time(n)).collect(),
            theta: (0..nodes).map(|n| traj.theta(n).to_vec()).collect(),
            u: (0..nodes).map(|n| traj.u(n).to_vec()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.first().map_or(0, Vec::len)
    }

    pub fn to_pair(&self, grid: TimeGrid) -> Result<TrajectoryPair> {
        let theta = self
            .theta
            .iter()
            .map(|r| SimplexVector::new(r.clone()))
            .collect::<mfg_core::Result<Vec<_>>>()?;
        let u = self
            .u
            .iter()
            .map(|r| ValueVector::new(r.clone()))
            .collect::<mfg_core::Result<Vec<_>>>()?;
        Ok(TrajectoryPair::new(grid, theta, u)?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let d = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=d).map(|i| format!("theta_{i}")));
        header.extend((1..=d).map(|i| format!("u_{i}")));
        let mut w = writer(path)?;
        let csv_err = |e| CliError::Csv {
            path: path.to_path_buf(),
            source: e,
        };
        w.write_record(&header).map_err(csv_err)?;
        for ((t, theta), u) in self.times.iter().zip(&self.theta).zip(&self.u) {
            let row = std::iter::once(t).chain(theta).chain(u).map(|x| float(*x));
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let csv_err = |e| CliError::Csv {
            path: path.to_path_buf(),
            source: e,
        };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let columns = r.headers().map_err(csv_err)?.len();
        if columns < 3 || (columns - 1) % 2 != 0 {
            return Err(CliError::config(
                path.display().to_string(),
                format!("unexpected {columns} columns"),
            ));
        }
        let d = (columns - 1) / 2;
        let mut table = TrajectoryTable {
            times: Vec::new(),
            theta: Vec::new(),
            u: Vec::new(),
        };
        for record in r.records() {
            let record = record.map_err(csv_err)?;
            let xs = record
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| CliError::config(path.display().to_string(), e))
                })
                .collect::<Result<Vec<f64>>>()?;
            table.times.push(xs[0]);
            table.theta.push(xs[1..=d].to_vec());
            table.u.push(xs[d + 1..].to_vec());
        }
        Ok(table)
    }
}

pub fn write_convergence(records: &[IterationRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let csv_err = |e| CliError::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    w.write_record(CONVERGENCE_HEADER).map_err(csv_err)?;
    let opt = |x: Option<f64>| x.map(float).unwrap_or_default();
    for r in records {
        w.write_record([
            r.iter.to_string(),
            float(r.residual),
            opt(r.distance),
            opt(r.hamiltonian_mean),
            opt(r.hamiltonian_std),
            float(r.min_theta),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Parses a convergence file back into records.
pub fn read_convergence(path: &Path) -> Result<Vec<IterationRecord>> {
    let bad = |e: &dyn std::fmt::Display| CliError::config(path.display().to_string(), e);
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| bad(&e))?;
        let num = |k: usize| record[k].parse::<f64>().map_err(|e| bad(&e));
        let opt = |k: usize| -> Result<Option<f64>> {
            if record[k].is_empty() {
                Ok(None)
            } else {
                num(k).map(Some)
            }
        };
        out.push(IterationRecord {
            iter: record[0].parse().map_err(|e| bad(&e))?,
            residual: num(1)?,
            distance: opt(2)?,
            hamiltonian_mean: opt(3)?,
            hamiltonian_std: opt(4)?,
            min_theta: num(5)?,
        });
    }
    Ok(out)
}

pub fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn float(x: f64) -> String {
    format!("{x:?}")
}
