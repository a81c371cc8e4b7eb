//! Projected Euler flow for weak stationary solutions.
//!
//! A stationary pair `(θ̄, ū, k̄)` solves `h(Δ_i ū, θ̄, i) = k̄` on the
//! support of `θ̄`, `h ≤ k̄` off it, and has zero Kolmogorov drift. The
//! iteration is `P∘E_μ` with `E_μ(θ, u) = (θ - μ h, u + μ drift)`, where
//! `P` projects the first component onto the simplex.

use crate::error::{MfgError, Result};
use crate::model::{drift_into, hamiltonians_into, Model};
use crate::report::{mean_std, should_record, DiagnosticsSink, IterationRecord, NoSink, SolveReport};
use crate::simplex::project_into;
use crate::types::{check_simplex, SimplexVector, ValueVector};

/// Masses below this are treated as an empty state by the weak check.
pub const SUPPORT_TOL: f64 = 1e-10;

/// A point `(θ, u)` of the stationary phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub theta: SimplexVector,
    pub u: ValueVector,
}

impl StationaryState {
    pub fn new(theta: SimplexVector, u: ValueVector) -> Result<Self> {
        if theta.dim() != u.dim() {
            return Err(MfgError::DimensionMismatch {
                expected: theta.dim(),
                got: u.dim(),
            });
        }
        Ok(StationaryState { theta, u })
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// Euclidean distance in `R^{2d}`.
    pub fn distance(&self, other: &StationaryState) -> f64 {
        let t = sq_dist(self.theta.as_slice(), other.theta.as_slice());
        let u = sq_dist(self.u.as_slice(), other.u.as_slice());
        (t + u).sqrt()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `A(θ, u) = (h(Δ_i u, θ, i), -drift(u, θ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorValue {
    pub theta_part: Vec<f64>,
    pub u_part: Vec<f64>,
}

/// Right-hand side of the continuous flow: `u_s = drift`, `θ_s = -h + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRhs {
    pub u_s: Vec<f64>,
    pub theta_s: Vec<f64>,
}

impl FlowRhs {
    pub fn sup_norm(&self) -> f64 {
        self.u_s.iter().chain(&self.theta_s).fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// An unprojected Euler image; `theta` need not lie on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerCandidate {
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
}

fn check_model<M: Model + ?Sized>(model: &M, state: &StationaryState) -> Result<()> {
    if state.dim() != model.dim() {
        return Err(MfgError::DimensionMismatch {
            expected: model.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

fn check_step(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(MfgError::InvalidParameter {
            name: "step",
            reason: format!("must be positive and finite, got {mu}"),
        })
    }
}

fn h_and_drift<M: Model + ?Sized>(model: &M, theta: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = u.len();
    let mut h = vec![0.0; d];
    let mut drift = vec![0.0; d];
    hamiltonians_into(model, u, theta, &mut h);
    drift_into(model, u, theta, &mut drift);
    (h, drift)
}

pub fn operator_a<M: Model + ?Sized>(model: &M, state: &StationaryState) -> Result<OperatorValue> {
    check_model(model, state)?;
    let (h, drift) = h_and_drift(model, state.theta.as_slice(), state.u.as_slice());
    Ok(OperatorValue {
        theta_part: h,
        u_part: drift.into_iter().map(|x| -x).collect(),
    })
}

/// `k(θ, u) = (1/d) Σ_i h(Δ_i u, θ, i)`, which keeps `Σ θ` fixed along the flow.
pub fn normalizer_k<M: Model + ?Sized>(model: &M, state: &StationaryState) -> Result<f64> {
    Ok(operator_a(model, state)?.theta_part.iter().sum::<f64>() / state.dim() as f64)
}

pub fn flow_rhs<M: Model + ?Sized>(model: &M, state: &StationaryState) -> Result<FlowRhs> {
    check_model(model, state)?;
    let (h, drift) = h_and_drift(model, state.theta.as_slice(), state.u.as_slice());
    let k = h.iter().sum::<f64>() / h.len() as f64;
    Ok(FlowRhs {
        u_s: drift,
        theta_s: h.iter().map(|x| k - x).collect(),
    })
}

/// `E_μ(θ, u)`, without projection.
pub fn euler_step<M: Model + ?Sized>(model: &M, state: &StationaryState, mu: f64) -> Result<EulerCandidate> {
    check_model(model, state)?;
    check_step(mu)?;
    Ok(raw_step(model, state.theta.as_slice(), state.u.as_slice(), mu))
}

fn raw_step<M: Model + ?Sized>(model: &M, theta: &[f64], u: &[f64], mu: f64) -> EulerCandidate {
    let (h, drift) = h_and_drift(model, theta, u);
    EulerCandidate {
        theta: theta.iter().zip(&h).map(|(t, h)| t - mu * h).collect(),
        u: u.iter().zip(&drift).map(|(u, d)| u + mu * d).collect(),
    }
}

/// Iterates `E_μ` alone, letting `θ` leave the simplex. Returns the
/// `iters + 1` iterates starting with `init`; stops early if an entry
/// stops being finite.
pub fn euler_orbit<M: Model + ?Sized>(
    model: &M,
    init: &StationaryState,
    mu: f64,
    iters: usize,
) -> Result<Vec<EulerCandidate>> {
    check_model(model, init)?;
    check_step(mu)?;
    let mut orbit = vec![EulerCandidate {
        theta: init.theta.as_slice().to_vec(),
        u: init.u.as_slice().to_vec(),
    }];
    for _ in 0..iters {
        let last = orbit.last().expect("orbit starts non-empty");
        let next = raw_step(model, &last.theta, &last.u, mu);
        let finite = next.theta.iter().chain(&next.u).all(|x| x.is_finite());
        orbit.push(next);
        if !finite {
            break;
        }
    }
    Ok(orbit)
}

/// Explicit Euler iterates of the mass-preserving flow
/// `θ ← θ - μ (h - k)`, `u ← u + μ drift`, without projection.
pub fn flow_orbit<M: Model + ?Sized>(
    model: &M,
    init: &StationaryState,
    mu: f64,
    iters: usize,
) -> Result<Vec<EulerCandidate>> {
    check_model(model, init)?;
    check_step(mu)?;
    let mut orbit = vec![EulerCandidate {
        theta: init.theta.as_slice().to_vec(),
        u: init.u.as_slice().to_vec(),
    }];
    for _ in 0..iters {
        let last = orbit.last().expect("orbit starts non-empty");
        let mut next = raw_step(model, &last.theta, &last.u, mu);
        let k = last.theta.iter().zip(&next.theta).map(|(a, b)| a - b).sum::<f64>() / mu / last.theta.len() as f64;
        next.theta.iter_mut().for_each(|t| *t += mu * k);
        let finite = next.theta.iter().chain(&next.u).all(|x| x.is_finite());
        orbit.push(next);
        if !finite {
            break;
        }
    }
    Ok(orbit)
}

/// One step of `P∘E_μ` together with the normalizer estimate
/// `ξ/μ` (empty active set) or the mean of `h` over occupied states.
pub fn projected_step<M: Model + ?Sized>(
    model: &M,
    state: &StationaryState,
    mu: f64,
) -> Result<(StationaryState, f64)> {
    let cand = euler_step(model, state, mu)?;
    let d = state.dim();
    let mut theta = vec![0.0; d];
    let mut active = vec![false; d];
    let shift = project_into(&cand.theta, &mut theta, &mut active);
    let k_bar = if active.iter().any(|&a| a) {
        let (h, _) = h_and_drift(model, state.theta.as_slice(), state.u.as_slice());
        let occupied: Vec<f64> = h
            .iter()
            .zip(state.theta.as_slice())
            .filter(|(_, &t)| t > SUPPORT_TOL)
            .map(|(h, _)| *h)
            .collect();
        occupied.iter().sum::<f64>() / occupied.len().max(1) as f64
    } else {
        shift / mu
    };
    let u = ValueVector::new(cand.u)?;
    Ok((
        StationaryState {
            theta: SimplexVector::from_trusted(theta),
            u,
        },
        k_bar,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryConfig {
    pub step: f64,
    pub max_iters: usize,
    /// Stop once `‖flow_rhs‖∞` is at most this.
    pub residual_tol: f64,
    /// Record every `record_every`-th iterate; the final one is always kept.
    pub record_every: usize,
    pub reference: Option<StationaryState>,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        StationaryConfig {
            step: 8.0 / 300.0,
            max_iters: 300,
            residual_tol: 1e-9,
            record_every: 1,
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub theta: SimplexVector,
    pub u: ValueVector,
    pub k_bar: f64,
    /// Weak-solution defect of the returned triple.
    pub residual: f64,
    pub report: SolveReport,
}

impl StationarySolution {
    pub fn converged(&self) -> bool {
        self.report.converged
    }

    pub fn state(&self) -> StationaryState {
        StationaryState {
            theta: self.theta.clone(),
            u: self.u.clone(),
        }
    }
}

pub fn iterate_stationary<M: Model + ?Sized>(
    model: &M,
    init: &StationaryState,
    config: &StationaryConfig,
) -> Result<StationarySolution> {
    iterate_stationary_with(model, init, config, &mut NoSink)
}

/// Like [`iterate_stationary`], also streaming each record to `sink`.
pub fn iterate_stationary_with<M: Model + ?Sized>(
    model: &M,
    init: &StationaryState,
    config: &StationaryConfig,
    sink: &mut dyn DiagnosticsSink,
) -> Result<StationarySolution> {
    check_model(model, init)?;
    check_step(config.step)?;
    check_simplex(init.theta.as_slice())?;
    if let Some(r) = &config.reference {
        check_model(model, r)?;
    }
    let mut state = init.clone();
    let mut report = SolveReport::default();
    let mut iter = 0;
    loop {
        let (resid, record) = diagnose(model, &state, iter, config);
        let converged = resid <= config.residual_tol;
        let last = converged || iter == config.max_iters;
        if should_record(iter, config.record_every, last) {
            sink.record(&record);
            report.records.push(record);
        }
        if last {
            report.converged = converged;
            report.final_residual = resid;
            report.final_distance = record.distance;
            break;
        }
        state = projected_step(model, &state, config.step)?.0;
        iter += 1;
    }
    report.iterations = iter;
    let (_, k_bar) = projected_step(model, &state, config.step)?;
    let residual = check_weak_stationary(model, &state.theta, &state.u, k_bar)?;
    Ok(StationarySolution {
        theta: state.theta,
        u: state.u,
        k_bar,
        residual,
        report,
    })
}

fn diagnose<M: Model + ?Sized>(
    model: &M,
    state: &StationaryState,
    iter: usize,
    config: &StationaryConfig,
) -> (f64, IterationRecord) {
    let (h, drift) = h_and_drift(model, state.theta.as_slice(), state.u.as_slice());
    let (mean, std) = mean_std(&h);
    let resid = drift
        .iter()
        .chain(h.iter())
        .zip(std::iter::repeat_n(0.0, drift.len()).chain(std::iter::repeat(mean)))
        .fold(0.0_f64, |m, (x, shift)| m.max((x - shift).abs()));
    let record = IterationRecord {
        iter,
        residual: resid,
        distance: config.reference.as_ref().map(|r| state.distance(r)),
        hamiltonian_mean: Some(mean),
        hamiltonian_std: Some(std),
        min_theta: state.theta.as_slice().iter().copied().fold(f64::INFINITY, f64::min),
    };
    (resid, record)
}

/// Max-norm defect of the weak stationary conditions: `(h_i - k̄)^+`,
/// `|drift_i|` and, on the support (`θ_i > 1e-10`), `|h_i - k̄|`.
pub fn check_weak_stationary<M: Model + ?Sized>(
    model: &M,
    theta: &SimplexVector,
    u: &ValueVector,
    k_bar: f64,
) -> Result<f64> {
    let state = StationaryState::new(theta.clone(), u.clone())?;
    check_model(model, &state)?;
    let (h, drift) = h_and_drift(model, theta.as_slice(), u.as_slice());
    let mut defect = drift.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for (&hi, &ti) in h.iter().zip(theta.as_slice()) {
        defect = defect.max((hi - k_bar).max(0.0));
        if ti > SUPPORT_TOL {
            defect = defect.max((hi - k_bar).abs());
        }
    }
    Ok(defect)
}

/// `Σ (u - ũ)·(drift - drift̃) - Σ (θ - θ̃)·(h - h̃)`.
///
/// For a monotone coupling this is at most `-‖θ - θ̃‖²` times the
/// monotonicity constant.
pub fn monotone_bracket<M: Model + ?Sized>(model: &M, a: &StationaryState, b: &StationaryState) -> Result<f64> {
    check_model(model, a)?;
    check_model(model, b)?;
    let (ha, da) = h_and_drift(model, a.theta.as_slice(), a.u.as_slice());
    let (hb, db) = h_and_drift(model, b.theta.as_slice(), b.u.as_slice());
    let mut total = 0.0;
    for i in 0..a.dim() {
        total += (a.u.as_slice()[i] - b.u.as_slice()[i]) * (da[i] - db[i]);
        total -= (a.theta.as_slice()[i] - b.theta.as_slice()[i]) * (ha[i] - hb[i]);
    }
    Ok(total)
}
