//! Domain types: states, probability vectors, value vectors, time grids and
//! discretized trajectories.
//!
//! States are numbered `1..=d` in the public API and stored 0-indexed.

use crate::error::{MfgError, Result};

/// Absolute tolerance on the mass of a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A state in `{1, ..., d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(usize);

impl State {
    /// Builds the state with 1-based number `number`, checked against `dim`.
    pub fn new(number: usize, dim: usize) -> Result<Self> {
        if number == 0 || number > dim {
            return Err(MfgError::StateOutOfRange { state: number, dim });
        }
        Ok(State(number - 1))
    }

    /// 0-based storage index.
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based state number.
    pub fn number(self) -> usize {
        self.0 + 1
    }

    /// All states of a `dim`-state model, in order.
    pub fn all(dim: usize) -> impl Iterator<Item = State> {
        (0..dim).map(State)
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

fn check_finite(entries: &[f64]) -> Result<()> {
    match entries.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(MfgError::NonFinite {
            index,
            value: entries[index],
        }),
        None => Ok(()),
    }
}

/// Checks the probability-vector invariants without building a value.
pub(crate) fn check_simplex(entries: &[f64]) -> Result<()> {
    if entries.len() < 2 {
        return Err(MfgError::DimensionTooSmall(entries.len()));
    }
    check_finite(entries)?;
    if let Some(i) = entries.iter().position(|&x| x < 0.0) {
        return Err(MfgError::NotOnSimplex {
            reason: format!("entry {} is negative ({})", i + 1, entries[i]),
        });
    }
    let mass: f64 = entries.iter().sum();
    if (mass - 1.0).abs() > SIMPLEX_TOL {
        return Err(MfgError::NotOnSimplex {
            reason: format!("entries sum to {mass}"),
        });
    }
    Ok(())
}

/// True when `entries` already satisfies the probability-vector invariants.
pub(crate) fn is_on_simplex(entries: &[f64]) -> bool {
    entries.iter().all(|&x| x >= 0.0) && (entries.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL
}

/// Probability distribution over the `d` states.
///
/// Construction rejects negative entries and any mass defect larger than
/// [`SIMPLEX_TOL`]; it never renormalizes. Corrected vectors come from
/// [`crate::simplex::project_simplex`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_simplex(&entries)?;
        Ok(SimplexVector(entries))
    }

    /// Uniform distribution on `dim` states.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(MfgError::DimensionTooSmall(dim));
        }
        Ok(SimplexVector(vec![1.0 / dim as f64; dim]))
    }

    pub(crate) fn from_trusted(entries: Vec<f64>) -> Self {
        debug_assert!(check_simplex(&entries).is_ok(), "{entries:?}");
        SimplexVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, state: State) -> f64 {
        self.0[state.index()]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for SimplexVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Value function (cost-to-go) over the `d` states.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_finite(&entries)?;
        Ok(ValueVector(entries))
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        ValueVector::new(vec![value; dim])
    }

    pub(crate) fn from_trusted(entries: Vec<f64>) -> Self {
        ValueVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, state: State) -> f64 {
        self.0[state.index()]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ValueVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Uniform grid of `intervals` steps over `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    intervals: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, intervals: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(MfgError::InvalidHorizon(horizon));
        }
        if intervals < 2 {
            return Err(MfgError::GridTooSmall(intervals));
        }
        Ok(TimeGrid { horizon, intervals })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of intervals `N`; the grid has `N + 1` nodes.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.intervals as f64
    }

    /// Time of node `n`, computed as `n T / N`.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.horizon / self.intervals as f64
    }
}

/// Time-discretized pair `(theta_n, u_n)`, `n = 0..=N`, stored row-major.
///
/// `theta[0]` is the initial distribution and `u[N]` the terminal cost; the
/// solvers never modify those two slots.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPair {
    grid: TimeGrid,
    dim: usize,
    theta: Vec<f64>,
    u: Vec<f64>,
}

impl TrajectoryPair {
    /// Builds a trajectory from per-node vectors, validating every slice.
    pub fn new(grid: TimeGrid, theta: Vec<SimplexVector>, u: Vec<ValueVector>) -> Result<Self> {
        let nodes = grid.nodes();
        if theta.len() != nodes {
            return Err(MfgError::DimensionMismatch {
                expected: nodes,
                got: theta.len(),
            });
        }
        if u.len() != nodes {
            return Err(MfgError::DimensionMismatch {
                expected: nodes,
                got: u.len(),
            });
        }
        let dim = theta[0].dim();
        let mut flat_theta = Vec::with_capacity(nodes * dim);
        let mut flat_u = Vec::with_capacity(nodes * dim);
        for (t, v) in theta.iter().zip(&u) {
            for got in [t.dim(), v.dim()] {
                if got != dim {
                    return Err(MfgError::DimensionMismatch { expected: dim, got });
                }
            }
            flat_theta.extend_from_slice(t.as_slice());
            flat_u.extend_from_slice(v.as_slice());
        }
        Ok(TrajectoryPair {
            grid,
            dim,
            theta: flat_theta,
            u: flat_u,
        })
    }

    /// Builds a trajectory from flat row-major storage of `(N + 1) * dim` entries each.
    pub fn from_flat(grid: TimeGrid, dim: usize, theta: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(MfgError::DimensionTooSmall(dim));
        }
        let expected = grid.nodes() * dim;
        for got in [theta.len(), u.len()] {
            if got != expected {
                return Err(MfgError::DimensionMismatch { expected, got });
            }
        }
        for row in theta.chunks(dim) {
            check_simplex(row)?;
        }
        check_finite(&u)?;
        Ok(TrajectoryPair { grid, dim, theta, u })
    }

    pub(crate) fn from_flat_trusted(grid: TimeGrid, dim: usize, theta: Vec<f64>, u: Vec<f64>) -> Self {
        debug_assert_eq!(theta.len(), grid.nodes() * dim);
        debug_assert_eq!(u.len(), grid.nodes() * dim);
        TrajectoryPair { grid, dim, theta, u }
    }

    /// Straight-line-in-time interpolation from `(theta0, u0_guess)` at `t = 0`
    /// to `(theta_terminal_guess, u_terminal)` at `t = T`.
    ///
    /// Slot `theta[0]` equals `theta0` and slot `u[N]` equals `u_terminal`
    /// bitwise.
    pub fn linear(
        grid: TimeGrid,
        theta0: &SimplexVector,
        theta_terminal_guess: &SimplexVector,
        u0_guess: &ValueVector,
        u_terminal: &ValueVector,
    ) -> Result<Self> {
        let dim = theta0.dim();
        for got in [theta_terminal_guess.dim(), u0_guess.dim(), u_terminal.dim()] {
            if got != dim {
                return Err(MfgError::DimensionMismatch { expected: dim, got });
            }
        }
        let n_max = grid.intervals();
        let nodes = grid.nodes();
        let mut theta = Vec::with_capacity(nodes * dim);
        let mut u = Vec::with_capacity(nodes * dim);
        for n in 0..nodes {
            let w = n as f64 / n_max as f64;
            if n == 0 {
                theta.extend_from_slice(theta0.as_slice());
            } else if n == n_max {
                theta.extend_from_slice(theta_terminal_guess.as_slice());
            } else {
                let row: Vec<f64> = theta0
                    .as_slice()
                    .iter()
                    .zip(theta_terminal_guess.as_slice())
                    .map(|(a, b)| a + w * (b - a))
                    .collect();
                theta.extend(crate::simplex::project_simplex(&row)?.projected.into_inner());
            }
            if n == n_max {
                u.extend_from_slice(u_terminal.as_slice());
            } else {
                u.extend(
                    u0_guess
                        .as_slice()
                        .iter()
                        .zip(u_terminal.as_slice())
                        .map(|(a, b)| a + w * (b - a)),
                );
            }
        }
        Ok(TrajectoryPair::from_flat_trusted(grid, dim, theta, u))
    }

    /// Constant-in-time trajectory `theta_n = theta0`, `u_n = u_terminal`.
    pub fn constant(grid: TimeGrid, theta0: &SimplexVector, u_terminal: &ValueVector) -> Result<Self> {
        TrajectoryPair::linear(grid, theta0, theta0, u_terminal, u_terminal)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self, n: usize) -> &[f64] {
        &self.theta[n * self.dim..(n + 1) * self.dim]
    }

    pub fn u(&self, n: usize) -> &[f64] {
        &self.u[n * self.dim..(n + 1) * self.dim]
    }

    /// Flat row-major view of all distribution slices.
    pub fn theta_flat(&self) -> &[f64] {
        &self.theta
    }

    /// Flat row-major view of all value slices.
    pub fn u_flat(&self) -> &[f64] {
        &self.u
    }

    pub fn initial_theta(&self) -> SimplexVector {
        SimplexVector::from_trusted(self.theta(0).to_vec())
    }

    pub fn terminal_u(&self) -> ValueVector {
        ValueVector::from_trusted(self.u(self.grid.intervals()).to_vec())
    }

    pub fn theta_vectors(&self) -> Vec<SimplexVector> {
        self.theta
            .chunks(self.dim)
            .map(|c| SimplexVector::from_trusted(c.to_vec()))
            .collect()
    }

    pub fn u_vectors(&self) -> Vec<ValueVector> {
        self.u
            .chunks(self.dim)
            .map(|c| ValueVector::from_trusted(c.to_vec()))
            .collect()
    }

    /// Same grid, dimension and initial-terminal data.
    pub fn shares_boundary_with(&self, other: &TrajectoryPair) -> bool {
        self.grid == other.grid
            && self.dim == other.dim
            && self.theta(0) == other.theta(0)
            && self.u(self.grid.intervals()) == other.u(other.grid.intervals())
    }

    /// Replaces the value slices, keeping the distribution.
    pub fn with_u(&self, u: Vec<ValueVector>) -> Result<TrajectoryPair> {
        if u.len() != self.grid.nodes() {
            return Err(MfgError::DimensionMismatch {
                expected: self.grid.nodes(),
                got: u.len(),
            });
        }
        let mut flat = Vec::with_capacity(self.u.len());
        for v in &u {
            if v.dim() != self.dim {
                return Err(MfgError::DimensionMismatch {
                    expected: self.dim,
                    got: v.dim(),
                });
            }
            flat.extend_from_slice(v.as_slice());
        }
        Ok(TrajectoryPair::from_flat_trusted(
            self.grid,
            self.dim,
            self.theta.clone(),
            flat,
        ))
    }

    /// Samples every `stride`-th node onto `coarse`, which must cover the
    /// same horizon with `N / stride` intervals.
    pub fn restrict_to(&self, coarse: TimeGrid) -> Result<TrajectoryPair> {
        if coarse.horizon() != self.grid.horizon()
            || coarse.intervals() == 0
            || !self.grid.intervals().is_multiple_of(coarse.intervals())
        {
            return Err(MfgError::GridMismatch);
        }
        let stride = self.grid.intervals() / coarse.intervals();
        let mut theta = Vec::with_capacity(coarse.nodes() * self.dim);
        let mut u = Vec::with_capacity(coarse.nodes() * self.dim);
        for n in 0..coarse.nodes() {
            theta.extend_from_slice(self.theta(n * stride));
            u.extend_from_slice(self.u(n * stride));
        }
        Ok(TrajectoryPair::from_flat_trusted(coarse, self.dim, theta, u))
    }

    /// Smallest distribution entry over all slices.
    pub fn min_theta(&self) -> f64 {
        self.theta.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
