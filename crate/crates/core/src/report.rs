//! Per-iteration diagnostics shared by both solvers.

use std::sync::mpsc::Sender;

/// One row of a convergence trace.
///
/// For the stationary solver `residual` is `‖flow_rhs‖∞`, `distance` is the
/// Euclidean distance to the reference state and the Hamiltonian statistics
/// are taken over states (`hamiltonian_mean` is the normalizer `k`). For the
/// time-dependent solver `residual` is the projected deformation norm,
/// `distance` the squared weighted H¹ distance to the reference and the
/// statistics are those of `H(ū_n, θ_n)` over grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    pub distance: Option<f64>,
    pub hamiltonian_mean: Option<f64>,
    pub hamiltonian_std: Option<f64>,
    pub min_theta: f64,
}

/// Trace and outcome of an iterative solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    /// Number of accepted steps.
    pub iterations: usize,
    pub final_residual: f64,
    pub final_distance: Option<f64>,
}

impl SolveReport {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Distances of all records that carry one, in iteration order.
    pub fn distances(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.distance).collect()
    }
}

/// Receives records as they are produced.
pub trait DiagnosticsSink {
    fn record(&mut self, record: &IterationRecord);
}

/// Discards every record.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoSink;

impl DiagnosticsSink for NoSink {
    fn record(&mut self, _: &IterationRecord) {}
}

impl DiagnosticsSink for Vec<IterationRecord> {
    fn record(&mut self, record: &IterationRecord) {
        self.push(*record);
    }
}

/// Forwards records to another thread; a disconnected receiver is ignored.
impl DiagnosticsSink for Sender<IterationRecord> {
    fn record(&mut self, record: &IterationRecord) {
        let _ = self.send(*record);
    }
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Records iteration `iter` when it falls on the recording stride or is forced.
pub(crate) fn should_record(iter: usize, every: usize, force: bool) -> bool {
    force || every == 0 || iter.is_multiple_of(every)
}
