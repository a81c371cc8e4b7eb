//! Time-dependent solver: the discrete operator `A^N`, the discrete H¹
//! representations `Φ`, `Ψ`, the projected deformation iteration, value
//! recovery and the norms used to measure it.
//!
//! Trajectories live on a grid `t_n = n δt`, `n = 0..N`, with `θ_0` and
//! `u_N` pinned. One deformation step is
//!
//! ```text
//! u_n ← u_n + υ φ_n          (n = 0..N-1)
//! θ_n ← P(θ_n + υ ψ_n)       (n = 1..N)
//! ```
//!
//! where `φ` solves the terminal-zero and `ψ` the initial-zero elliptic
//! problem of [`crate::elliptic`] with right-hand sides built from the
//! Kolmogorov and Hamilton-Jacobi defects.
//!
//! The projection removes the state-uniform part of `ψ`, so an iterate can
//! settle with `ψ_n = κ_n (1, .., 1)` and `u` off the solution by a
//! state-uniform shift. [`recover_value`] removes that shift; the solver
//! reports distances and Hamiltonian statistics of the recovered pair and
//! stops on the size of the projected displacement.

use crate::elliptic::{BoundaryKind, EllipticSolver};
use crate::error::{MfgError, Result};
use crate::exec::Execution;
use crate::model::{drift_into, energy_slices, hamiltonians_into, Model};
use crate::report::{mean_std, should_record, DiagnosticsSink, IterationRecord, NoSink, SolveReport};
use crate::simplex::project_into;
use crate::types::{TimeGrid, TrajectoryPair, ValueVector};

fn check_model<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Result<()> {
    if traj.dim() != model.dim() {
        return Err(MfgError::DimensionMismatch {
            expected: model.dim(),
            got: traj.dim(),
        });
    }
    Ok(())
}

fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(MfgError::InvalidParameter {
            name: "step",
            reason: format!("must be positive and finite, got {step}"),
        })
    }
}

fn to_vectors(flat: &[f64], dim: usize) -> Vec<ValueVector> {
    flat.chunks(dim)
        .map(|c| ValueVector::from_trusted(c.to_vec()))
        .collect()
}

/// Value of `A^N` on a trajectory, `N` rows per component.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteResidual {
    dim: usize,
    theta_rows: Vec<f64>,
    u_rows: Vec<f64>,
    k: Vec<f64>,
}

impl DiscreteResidual {
    pub fn intervals(&self) -> usize {
        self.k.len()
    }

    /// `-δθ_n/δt + drift(u_{n+1}, θ_{n+1}) + k_n`.
    pub fn theta_row(&self, n: usize) -> &[f64] {
        &self.theta_rows[n * self.dim..(n + 1) * self.dim]
    }

    /// `-δu_n/δt - h(Δ_i u_n, θ_n, i)`.
    pub fn u_row(&self, n: usize) -> &[f64] {
        &self.u_rows[n * self.dim..(n + 1) * self.dim]
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn sup_norm(&self) -> f64 {
        self.theta_rows
            .iter()
            .chain(&self.u_rows)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn discrete_operator<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Result<DiscreteResidual> {
    check_model(model, traj)?;
    let d = traj.dim();
    let n_max = traj.grid().intervals();
    let dt = traj.grid().dt();
    let mut theta_rows = vec![0.0; n_max * d];
    let mut u_rows = vec![0.0; n_max * d];
    let mut k = vec![0.0; n_max];
    let mut buf = vec![0.0; d];
    for n in 0..n_max {
        let t_row = &mut theta_rows[n * d..(n + 1) * d];
        drift_into(model, traj.u(n + 1), traj.theta(n + 1), t_row);
        for ((x, a), b) in t_row.iter_mut().zip(traj.theta(n + 1)).zip(traj.theta(n)) {
            *x -= (a - b) / dt;
        }
        k[n] = -t_row.iter().sum::<f64>() / d as f64;
        t_row.iter_mut().for_each(|x| *x += k[n]);

        hamiltonians_into(model, traj.u(n), traj.theta(n), &mut buf);
        let u_row = &mut u_rows[n * d..(n + 1) * d];
        for (((x, a), b), h) in u_row.iter_mut().zip(traj.u(n + 1)).zip(traj.u(n)).zip(&buf) {
            *x = -(a - b) / dt - h;
        }
    }
    Ok(DiscreteResidual {
        dim: d,
        theta_rows,
        u_rows,
        k,
    })
}

/// The pair `Q_A(θ, u) = (Φ, Ψ)` on all `N + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationField {
    dim: usize,
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl DeformationField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi(&self, n: usize) -> &[f64] {
        &self.phi[n * self.dim..(n + 1) * self.dim]
    }

    pub fn psi(&self, n: usize) -> &[f64] {
        &self.psi[n * self.dim..(n + 1) * self.dim]
    }

    pub fn phi_vectors(&self) -> Vec<ValueVector> {
        to_vectors(&self.phi, self.dim)
    }

    pub fn psi_vectors(&self) -> Vec<ValueVector> {
        to_vectors(&self.psi, self.dim)
    }

    pub fn sup_norm(&self) -> f64 {
        self.phi.iter().chain(&self.psi).fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Cached factorizations for repeated deformation steps on one grid.
#[derive(Debug, Clone)]
pub struct Deformation<'m, M: ?Sized> {
    model: &'m M,
    grid: TimeGrid,
    phi_solver: EllipticSolver,
    psi_solver: EllipticSolver,
    exec: Execution,
}

impl<'m, M: Model + ?Sized> Deformation<'m, M> {
    pub fn new(model: &'m M, grid: TimeGrid, exec: Execution) -> Self {
        Deformation {
            model,
            grid,
            phi_solver: EllipticSolver::new(grid, BoundaryKind::TerminalZero),
            psi_solver: EllipticSolver::new(grid, BoundaryKind::InitialZero),
            exec,
        }
    }

    fn check(&self, traj: &TrajectoryPair) -> Result<()> {
        check_model(self.model, traj)?;
        if traj.grid() != self.grid {
            return Err(MfgError::GridMismatch);
        }
        Ok(())
    }

    /// Right-hand sides on the interior nodes `1..N-1`, flat row-major.
    fn rhs(&self, traj: &TrajectoryPair) -> (Vec<f64>, Vec<f64>) {
        let d = traj.dim();
        let interior = self.grid.intervals() - 1;
        let dt = self.grid.dt();
        let model = self.model;
        let mut phi_rhs = vec![0.0; interior * d];
        let mut psi_rhs = vec![0.0; interior * d];
        self.exec.for_each_chunk(&mut phi_rhs, d, |k, row| {
            let n = k + 1;
            drift_into(model, traj.u(n), traj.theta(n), row);
            for ((x, a), b) in row.iter_mut().zip(traj.theta(n)).zip(traj.theta(n - 1)) {
                *x -= (a - b) / dt;
            }
        });
        self.exec.for_each_chunk(&mut psi_rhs, d, |k, row| {
            let n = k + 1;
            hamiltonians_into(model, traj.u(n), traj.theta(n), row);
            for ((x, a), b) in row.iter_mut().zip(traj.u(n + 1)).zip(traj.u(n)) {
                *x = -(a - b) / dt - *x;
            }
        });
        (phi_rhs, psi_rhs)
    }

    fn solve_columns(&self, solver: &EllipticSolver, rhs: &[f64], d: usize) -> Vec<f64> {
        let coords: Vec<usize> = (0..d).collect();
        let nodes = self.grid.nodes();
        let columns = self.exec.map(&coords, |&i| {
            let mut col = vec![0.0; nodes];
            solver.solve_strided(|k| rhs[k * d + i], &mut col, 0, 1);
            col
        });
        let mut out = vec![0.0; nodes * d];
        for (i, col) in columns.iter().enumerate() {
            for (n, &x) in col.iter().enumerate() {
                out[n * d + i] = x;
            }
        }
        out
    }

    pub fn field(&self, traj: &TrajectoryPair) -> Result<DeformationField> {
        self.check(traj)?;
        let d = traj.dim();
        let (phi_rhs, psi_rhs) = self.rhs(traj);
        Ok(DeformationField {
            dim: d,
            phi: self.solve_columns(&self.phi_solver, &phi_rhs, d),
            psi: self.solve_columns(&self.psi_solver, &psi_rhs, d),
        })
    }

    /// `P[w + υ Q_A(w)]`.
    pub fn step(&self, traj: &TrajectoryPair, step: f64) -> Result<TrajectoryPair> {
        check_step(step)?;
        let field = self.field(traj)?;
        Ok(self.apply(traj, &field, step))
    }

    fn apply(&self, traj: &TrajectoryPair, field: &DeformationField, step: f64) -> TrajectoryPair {
        let d = traj.dim();
        let n_max = self.grid.intervals();
        let mut u = traj.u_flat().to_vec();
        for (x, p) in u[..n_max * d].iter_mut().zip(&field.phi) {
            *x += step * p;
        }
        let mut theta = traj.theta_flat().to_vec();
        self.exec.for_each_chunk(&mut theta[d..], d, |k, row| {
            let n = k + 1;
            let moved: Vec<f64> = traj
                .theta(n)
                .iter()
                .zip(field.psi(n))
                .map(|(t, p)| t + step * p)
                .collect();
            let mut active = vec![false; d];
            project_into(&moved, row, &mut active);
        });
        TrajectoryPair::from_flat_trusted(self.grid, d, theta, u)
    }
}

pub fn representation_phi<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Result<Vec<ValueVector>> {
    let field = Deformation::new(model, traj.grid(), Execution::Sequential).field(traj)?;
    Ok(field.phi_vectors())
}

pub fn representation_psi<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Result<Vec<ValueVector>> {
    let field = Deformation::new(model, traj.grid(), Execution::Sequential).field(traj)?;
    Ok(field.psi_vectors())
}

pub fn deformation_step<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair, step: f64) -> Result<TrajectoryPair> {
    Deformation::new(model, traj.grid(), Execution::default()).step(traj, step)
}

/// Backward recursion `ū_N = ū_T`, `ū_n = ū_{n+1} + δt h(Δ_i u_n, θ_n, i)`.
pub fn recover_value<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Result<Vec<ValueVector>> {
    check_model(model, traj)?;
    Ok(to_vectors(&recover_flat(model, traj), traj.dim()))
}

fn recover_flat<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Vec<f64> {
    let d = traj.dim();
    let n_max = traj.grid().intervals();
    let dt = traj.grid().dt();
    let mut out = vec![0.0; traj.grid().nodes() * d];
    out[n_max * d..].copy_from_slice(traj.u(n_max));
    let mut h = vec![0.0; d];
    for n in (0..n_max).rev() {
        hamiltonians_into(model, traj.u(n), traj.theta(n), &mut h);
        for i in 0..d {
            out[n * d + i] = out[(n + 1) * d + i] + dt * h[i];
        }
    }
    out
}

/// `(θ, ū)` with `ū` from [`recover_value`].
pub fn recovered_trajectory<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Result<TrajectoryPair> {
    check_model(model, traj)?;
    let u = recover_flat(model, traj);
    Ok(TrajectoryPair::from_flat_trusted(
        traj.grid(),
        traj.dim(),
        traj.theta_flat().to_vec(),
        u,
    ))
}

/// Difference `(η, ν) = (θ_a - θ_b, u_a - u_b)`, or any pair of sequences
/// on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDiff {
    grid: TimeGrid,
    dim: usize,
    eta: Vec<f64>,
    nu: Vec<f64>,
}

impl TrajectoryDiff {
    pub fn between(a: &TrajectoryPair, b: &TrajectoryPair) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(MfgError::GridMismatch);
        }
        if a.dim() != b.dim() {
            return Err(MfgError::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let sub = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p - q).collect();
        Ok(TrajectoryDiff {
            grid: a.grid(),
            dim: a.dim(),
            eta: sub(a.theta_flat(), b.theta_flat()),
            nu: sub(a.u_flat(), b.u_flat()),
        })
    }

    /// Flat row-major `(N + 1) * dim` sequences.
    pub fn from_parts(grid: TimeGrid, dim: usize, eta: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        let expected = grid.nodes() * dim;
        for got in [eta.len(), nu.len()] {
            if got != expected {
                return Err(MfgError::DimensionMismatch { expected, got });
            }
        }
        Ok(TrajectoryDiff { grid, dim, eta, nu })
    }

    fn from_field(grid: TimeGrid, field: &DeformationField) -> Self {
        TrajectoryDiff {
            grid,
            dim: field.dim,
            eta: field.psi.clone(),
            nu: field.phi.clone(),
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn eta(&self, n: usize) -> &[f64] {
        &self.eta[n * self.dim..(n + 1) * self.dim]
    }

    pub fn nu(&self, n: usize) -> &[f64] {
        &self.nu[n * self.dim..(n + 1) * self.dim]
    }

    pub fn add(&self, other: &TrajectoryDiff) -> Result<TrajectoryDiff> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &TrajectoryDiff) -> Result<TrajectoryDiff> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &TrajectoryDiff, sign: f64) -> Result<TrajectoryDiff> {
        self.check_compatible(other)?;
        let comb = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p + sign * q).collect();
        Ok(TrajectoryDiff {
            grid: self.grid,
            dim: self.dim,
            eta: comb(&self.eta, &other.eta),
            nu: comb(&self.nu, &other.nu),
        })
    }

    fn check_compatible(&self, other: &TrajectoryDiff) -> Result<()> {
        if self.grid != other.grid {
            return Err(MfgError::GridMismatch);
        }
        if self.dim != other.dim {
            return Err(MfgError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ_{n<N} a_n·b_n` and `Σ_{n<N} δa_n·δb_n` over one flat sequence pair,
/// plus the value sum over `1..=N`.
fn sums(a: &[f64], b: &[f64], d: usize, n_max: usize) -> (f64, f64, f64) {
    let row = |v: &[f64], n: usize| -> Vec<f64> { v[n * d..(n + 1) * d].to_vec() };
    let delta = |v: &[f64], n: usize| -> Vec<f64> { (0..d).map(|i| v[(n + 1) * d + i] - v[n * d + i]).collect() };
    let mut head = 0.0;
    let mut diff = 0.0;
    for n in 0..n_max {
        head += dot(&row(a, n), &row(b, n));
        diff += dot(&delta(a, n), &delta(b, n));
    }
    let tail = head - dot(&row(a, 0), &row(b, 0)) + dot(&row(a, n_max), &row(b, n_max));
    (head, diff, tail)
}

/// `Σ_{n=0}^{N-1} η_n·η'_n + δη_n·δη'_n + ν_n·ν'_n + δν_n·δν'_n`, with raw
/// forward differences and no grid weights.
pub fn h1n_inner(a: &TrajectoryDiff, b: &TrajectoryDiff) -> Result<f64> {
    a.check_compatible(b)?;
    let n_max = a.grid.intervals();
    let (e0, e1, _) = sums(&a.eta, &b.eta, a.dim, n_max);
    let (v0, v1, _) = sums(&a.nu, &b.nu, a.dim, n_max);
    Ok(e0 + e1 + v0 + v1)
}

/// Inner product under which the representation problems are Riesz maps:
///
/// ```text
/// δt [ Σ_{n=0}^{N-1} η_n·η'_n + Σ_{n=1}^{N} ν_n·ν'_n
///      + Σ_{n=0}^{N-1} (δη_n·δη'_n + δν_n·δν'_n) / δt² ]
/// ```
///
/// The value sums skip the pinned slot of each component, so for two
/// trajectories with the same boundary data `⟨Q_A(a) - Q_A(b), a - b⟩`
/// reduces exactly to the pairing of defects with differences.
pub fn representation_inner(a: &TrajectoryDiff, b: &TrajectoryDiff) -> Result<f64> {
    a.check_compatible(b)?;
    let n_max = a.grid.intervals();
    let dt = a.grid.dt();
    let (e0, e1, _) = sums(&a.eta, &b.eta, a.dim, n_max);
    let (_, v1, v_tail) = sums(&a.nu, &b.nu, a.dim, n_max);
    Ok(dt * (e0 + v_tail + (e1 + v1) / (dt * dt)))
}

/// Squared distance in [`representation_inner`].
pub fn representation_distance(x: &TrajectoryPair, y: &TrajectoryPair) -> Result<f64> {
    let diff = TrajectoryDiff::between(x, y)?;
    representation_inner(&diff, &diff)
}

/// Squared distance `Σ_{j=0}^{N-1} Σ_i δt (|Δu|² + |δΔu/δt|² + |Δθ|² + |δΔθ/δt|²)`.
pub fn h1_weighted_distance(x: &TrajectoryPair, y: &TrajectoryPair) -> Result<f64> {
    let diff = TrajectoryDiff::between(x, y)?;
    Ok(weighted_sq(&diff))
}

fn weighted_sq(diff: &TrajectoryDiff) -> f64 {
    let n_max = diff.grid.intervals();
    let dt = diff.grid.dt();
    let (e0, e1, _) = sums(&diff.eta, &diff.eta, diff.dim, n_max);
    let (v0, v1, _) = sums(&diff.nu, &diff.nu, diff.dim, n_max);
    dt * (e0 + v0) + (e1 + v1) / dt
}

/// L² pairing of `A^N` differences against state differences:
/// `Σ_n (θ_n - θ̃_n)·(u-row_n - ũ-row_n) + (u_{n+1} - ũ_{n+1})·(θ-row_n - θ̃-row_n)`.
pub fn an_bracket<M: Model + ?Sized>(model: &M, a: &TrajectoryPair, b: &TrajectoryPair) -> Result<f64> {
    if !a.shares_boundary_with(b) {
        return Err(MfgError::BoundaryMismatch);
    }
    let ra = discrete_operator(model, a)?;
    let rb = discrete_operator(model, b)?;
    let d = a.dim();
    let mut total = 0.0;
    for n in 0..a.grid().intervals() {
        for i in 0..d {
            total += (a.theta(n)[i] - b.theta(n)[i]) * (ra.u_row(n)[i] - rb.u_row(n)[i]);
            total += (a.u(n + 1)[i] - b.u(n + 1)[i]) * (ra.theta_row(n)[i] - rb.theta_row(n)[i]);
        }
    }
    Ok(total)
}

/// `⟨Q_A(a) - Q_A(b), a - b⟩` in [`representation_inner`], pairing `θ`
/// with `ψ` and `u` with `φ`.
pub fn qa_monotone_bracket<M: Model + ?Sized>(model: &M, a: &TrajectoryPair, b: &TrajectoryPair) -> Result<f64> {
    if !a.shares_boundary_with(b) {
        return Err(MfgError::BoundaryMismatch);
    }
    let op = Deformation::new(model, a.grid(), Execution::Sequential);
    let fa = TrajectoryDiff::from_field(a.grid(), &op.field(a)?);
    let fb = TrajectoryDiff::from_field(b.grid(), &op.field(b)?);
    representation_inner(&fa.sub(&fb)?, &TrajectoryDiff::between(a, b)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdConfig {
    pub step: f64,
    pub max_iters: usize,
    /// Stop once the projected displacement `‖w_{k+1} - w_k‖ / υ`, in the
    /// weighted H¹ norm, is at most this.
    pub fixpoint_tol: f64,
    pub record_every: usize,
    pub reference: Option<TrajectoryPair>,
    pub execution: Execution,
}

impl Default for TdConfig {
    fn default() -> Self {
        TdConfig {
            step: 8.0 / 450.0,
            max_iters: 20_000,
            fixpoint_tol: 1e-10,
            record_every: 1,
            reference: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdSolution {
    /// Last iterate of the deformation flow.
    pub iterate: TrajectoryPair,
    /// The iterate's distribution with recovered values.
    pub solution: TrajectoryPair,
    pub report: SolveReport,
}

impl TdSolution {
    pub fn converged(&self) -> bool {
        self.report.converged
    }
}

pub fn iterate_timedep<M: Model + ?Sized>(model: &M, init: &TrajectoryPair, config: &TdConfig) -> Result<TdSolution> {
    iterate_timedep_with(model, init, config, &mut NoSink)
}

pub fn iterate_timedep_with<M: Model + ?Sized>(
    model: &M,
    init: &TrajectoryPair,
    config: &TdConfig,
    sink: &mut dyn DiagnosticsSink,
) -> Result<TdSolution> {
    check_model(model, init)?;
    check_step(config.step)?;
    if let Some(r) = &config.reference {
        if !r.shares_boundary_with(init) {
            return Err(MfgError::BoundaryMismatch);
        }
    }
    let op = Deformation::new(model, init.grid(), config.execution);
    let mut current = init.clone();
    let mut report = SolveReport::default();
    let mut iter = 0;
    loop {
        let next = op.step(&current, config.step)?;
        let displacement = weighted_sq(&TrajectoryDiff::between(&next, &current)?).sqrt() / config.step;
        let converged = displacement <= config.fixpoint_tol;
        let last = converged || iter == config.max_iters;
        if should_record(iter, config.record_every, last) {
            let record = diagnose(model, &current, iter, displacement, config.reference.as_ref())?;
            sink.record(&record);
            report.records.push(record);
            if last {
                report.final_distance = record.distance;
            }
        }
        if last {
            report.converged = converged;
            report.final_residual = displacement;
            break;
        }
        current = next;
        iter += 1;
    }
    report.iterations = iter;
    let solution = recovered_trajectory(model, &current)?;
    Ok(TdSolution {
        iterate: current,
        solution,
        report,
    })
}

fn diagnose<M: Model + ?Sized>(
    model: &M,
    traj: &TrajectoryPair,
    iter: usize,
    displacement: f64,
    reference: Option<&TrajectoryPair>,
) -> Result<IterationRecord> {
    let recovered = recovered_trajectory(model, traj)?;
    let distance = reference.map(|r| h1_weighted_distance(&recovered, r)).transpose()?;
    let (mean, std) = match hamiltonian_trace(model, &recovered) {
        Some(h) => {
            let (m, s) = mean_std(&h);
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    Ok(IterationRecord {
        iter,
        residual: displacement,
        distance,
        hamiltonian_mean: mean,
        hamiltonian_std: std,
        min_theta: traj.min_theta(),
    })
}

/// `H(u_n, θ_n)` for `n = 0..N`, for models with potential structure.
pub fn hamiltonian_trace<M: Model + ?Sized>(model: &M, traj: &TrajectoryPair) -> Option<Vec<f64>> {
    let potential = model.potential()?;
    Some(
        (0..traj.grid().nodes())
            .map(|n| energy_slices(potential, traj.u(n), traj.theta(n)))
            .collect(),
    )
}

/// Solves the same problem on several grids, in parallel under `exec`.
pub fn solve_levels<M, F>(
    model: &M,
    grids: &[TimeGrid],
    init: F,
    config: &TdConfig,
    exec: Execution,
) -> Result<Vec<TdSolution>>
where
    M: Model + ?Sized,
    F: Fn(TimeGrid) -> Result<TrajectoryPair> + Send + Sync,
{
    exec.map(grids, |&grid| {
        let start = init(grid)?;
        let mut level = config.clone();
        level.reference = None;
        iterate_timedep(model, &start, &level)
    })
    .into_iter()
    .collect()
}

/// Squared weighted distances between successive levels, each measured on
/// the coarser grid after restricting the finer solution to its nodes.
pub fn successive_distances(levels: &[TdSolution]) -> Result<Vec<f64>> {
    levels
        .windows(2)
        .map(|w| {
            let coarse = &w[0].solution;
            let fine = w[1].solution.restrict_to(coarse.grid())?;
            h1_weighted_distance(&fine, coarse)
        })
        .collect()
}
