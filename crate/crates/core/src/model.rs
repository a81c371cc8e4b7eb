//! The finite-state model interface, the difference operator and the
//! Kolmogorov drift.

use crate::error::{MfgError, Result};
use crate::types::{SimplexVector, State, ValueVector};

/// A finite-state mean-field game given by its Hamiltonian and switching rates.
///
/// Both functions receive `z = Δ_i u` for the state `i` they are evaluated
/// at. `rates` writes a generator row: non-negative off-diagonal entries and
/// `out[i] = -Σ_{j≠i} out[j]`.
pub trait Model: Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, z: &[f64], theta: &[f64], i: State) -> f64;

    fn rates(&self, z: &[f64], theta: &[f64], i: State, out: &mut [f64]);

    /// Potential structure, when the coupling is the gradient of a convex `F`.
    fn potential(&self) -> Option<&dyn Potential> {
        None
    }
}

/// Decomposition `h(z, θ, i) = h̃(z, i) + ∂F/∂θ^i`.
pub trait Potential: Sync {
    fn htilde(&self, z: &[f64], i: State) -> f64;

    fn energy(&self, theta: &[f64]) -> f64;
}

type HamiltonianFn = dyn Fn(&[f64], &[f64], State) -> f64 + Send + Sync;
type RatesFn = dyn Fn(&[f64], &[f64], State, &mut [f64]) + Send + Sync;

/// A model assembled from closures.
pub struct ModelSpec {
    dim: usize,
    hamiltonian: Box<HamiltonianFn>,
    rates: Box<RatesFn>,
}

impl ModelSpec {
    pub fn new<H, R>(dim: usize, hamiltonian: H, rates: R) -> Result<Self>
    where
        H: Fn(&[f64], &[f64], State) -> f64 + Send + Sync + 'static,
        R: Fn(&[f64], &[f64], State, &mut [f64]) + Send + Sync + 'static,
    {
        if dim < 2 {
            return Err(MfgError::DimensionTooSmall(dim));
        }
        Ok(ModelSpec {
            dim,
            hamiltonian: Box::new(hamiltonian),
            rates: Box::new(rates),
        })
    }
}

impl Model for ModelSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn hamiltonian(&self, z: &[f64], theta: &[f64], i: State) -> f64 {
        (self.hamiltonian)(z, theta, i)
    }

    fn rates(&self, z: &[f64], theta: &[f64], i: State, out: &mut [f64]) {
        (self.rates)(z, theta, i, out)
    }
}

impl std::fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelSpec")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

/// `(Δ_i u)^j = u^j - u^i`.
pub fn difference(u: &ValueVector, i: State) -> Result<ValueVector> {
    if i.index() >= u.dim() {
        return Err(MfgError::StateOutOfRange {
            state: i.number(),
            dim: u.dim(),
        });
    }
    let mut out = vec![0.0; u.dim()];
    difference_into(u.as_slice(), i, &mut out);
    Ok(ValueVector::from_trusted(out))
}

#[inline]
pub(crate) fn difference_into(u: &[f64], i: State, out: &mut [f64]) {
    let base = u[i.index()];
    for (o, &x) in out.iter_mut().zip(u) {
        *o = x - base;
    }
    out[i.index()] = 0.0;
}

fn check_dims(dim: usize, u: &[f64], theta: &[f64]) -> Result<()> {
    for got in [u.len(), theta.len()] {
        if got != dim {
            return Err(MfgError::DimensionMismatch { expected: dim, got });
        }
    }
    Ok(())
}

/// Right-hand side of the Kolmogorov equation:
/// component `i` is `Σ_j θ^j α*_i(Δ_j u, θ, j)`.
pub fn kolmogorov_drift<M: Model + ?Sized>(model: &M, u: &ValueVector, theta: &SimplexVector) -> Result<Vec<f64>> {
    check_dims(model.dim(), u.as_slice(), theta.as_slice())?;
    let mut out = vec![0.0; model.dim()];
    drift_into(model, u.as_slice(), theta.as_slice(), &mut out);
    Ok(out)
}

/// `h(Δ_i u, θ, i)` for every state `i`.
pub fn hamiltonian_values<M: Model + ?Sized>(model: &M, u: &ValueVector, theta: &SimplexVector) -> Result<Vec<f64>> {
    check_dims(model.dim(), u.as_slice(), theta.as_slice())?;
    let mut out = vec![0.0; model.dim()];
    hamiltonians_into(model, u.as_slice(), theta.as_slice(), &mut out);
    Ok(out)
}

/// `H(u, θ) = Σ_i θ^i h̃(Δ_i u, i) + F(θ)` for models with potential structure.
pub fn potential_energy<M: Model + ?Sized>(model: &M, u: &ValueVector, theta: &SimplexVector) -> Result<f64> {
    check_dims(model.dim(), u.as_slice(), theta.as_slice())?;
    let potential = model.potential().ok_or(MfgError::NoPotential)?;
    Ok(energy_slices(potential, u.as_slice(), theta.as_slice()))
}

pub(crate) fn energy_slices(potential: &dyn Potential, u: &[f64], theta: &[f64]) -> f64 {
    let mut z = vec![0.0; u.len()];
    let mut total = 0.0;
    for i in State::all(u.len()) {
        difference_into(u, i, &mut z);
        total += theta[i.index()] * potential.htilde(&z, i);
    }
    total + potential.energy(theta)
}

pub(crate) fn drift_into<M: Model + ?Sized>(model: &M, u: &[f64], theta: &[f64], out: &mut [f64]) {
    let d = u.len();
    let mut z = vec![0.0; d];
    let mut row = vec![0.0; d];
    out.fill(0.0);
    for j in State::all(d) {
        let mass = theta[j.index()];
        if mass == 0.0 {
            continue;
        }
        difference_into(u, j, &mut z);
        model.rates(&z, theta, j, &mut row);
        for (o, r) in out.iter_mut().zip(&row) {
            *o += mass * r;
        }
    }
}

pub(crate) fn hamiltonians_into<M: Model + ?Sized>(model: &M, u: &[f64], theta: &[f64], out: &mut [f64]) {
    let mut z = vec![0.0; u.len()];
    for i in State::all(u.len()) {
        difference_into(u, i, &mut z);
        out[i.index()] = model.hamiltonian(&z, theta, i);
    }
}
