//! The two-state paradigm-shift model with CES productivity coupling.
//!
//! Researchers choose between two competing theories. The running cost is
//! `f(i, θ) + ½ Σ_{j≠i} μ_j²`, where the productivity `f` has constant
//! elasticity of substitution:
//!
//! ```text
//! f(i, θ) = (a_i (θ¹)^r + (1 - a_i) (θ²)^r)^(1/r)
//! h(u, θ, i) = f(i, θ) - ½ ((u^i - u^j)^+)²,   j ≠ i
//! α*_j(u, θ, i) = (u^i - u^j)^+
//! ```
//!
//! With `a₁ = 1`, `a₂ = 0`, `r = 1` the coupling is `f = ∇F` for
//! `F(θ) = ((θ¹)² + (θ²)²) / 2` and the game is potential. That instance has
//! the stationary family `((½, ½), (p, p), ½)` and the time-dependent exact
//! solution `θ ≡ (½, ½)`, `u^i(t) = (T - t)/2 + ū_T^i` when `ū_T` has equal
//! components.

use crate::error::{MfgError, Result};
use crate::model::{Model, Potential};
use crate::types::{SimplexVector, State, TimeGrid, TrajectoryPair, ValueVector};

#[inline]
fn positive_part(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// CES parameters `(a₁, a₂, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParadigmShiftParams {
    a1: f64,
    a2: f64,
    r: f64,
}

impl ParadigmShiftParams {
    /// Rejects `r = 0`: the CES expression has no value there without a limit.
    pub fn new(a1: f64, a2: f64, r: f64) -> Result<Self> {
        for (name, a) in [("a1", a1), ("a2", a2)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(MfgError::InvalidParameter {
                    name,
                    reason: format!("must lie in [0, 1], got {a}"),
                });
            }
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(MfgError::InvalidParameter {
                name: "r",
                reason: format!("must be finite and positive, got {r}"),
            });
        }
        Ok(ParadigmShiftParams { a1, a2, r })
    }

    /// `a₁ = 1`, `a₂ = 0`, `r = 1`.
    pub fn reference() -> Self {
        ParadigmShiftParams {
            a1: 1.0,
            a2: 0.0,
            r: 1.0,
        }
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_reference(&self) -> bool {
        *self == ParadigmShiftParams::reference()
    }

    fn weight(&self, i: State) -> f64 {
        if i.index() == 0 {
            self.a1
        } else {
            self.a2
        }
    }
}

fn check_two(len: usize) -> Result<()> {
    if len != 2 {
        return Err(MfgError::DimensionMismatch { expected: 2, got: len });
    }
    Ok(())
}

#[inline]
fn coupling_raw(params: &ParadigmShiftParams, theta: &[f64], i: State) -> f64 {
    let a = params.weight(i);
    if params.r == 1.0 {
        return a * theta[0] + (1.0 - a) * theta[1];
    }
    (a * theta[0].powf(params.r) + (1.0 - a) * theta[1].powf(params.r)).powf(1.0 / params.r)
}

#[inline]
fn gap(u: &[f64], i: State) -> f64 {
    let j = 1 - i.index();
    positive_part(u[i.index()] - u[j])
}

/// Productivity `f(i, θ)`.
pub fn ces_coupling(params: &ParadigmShiftParams, theta: &SimplexVector, i: State) -> Result<f64> {
    check_two(theta.dim())?;
    Ok(coupling_raw(params, theta.as_slice(), i))
}

/// `f(i, θ) - ½ ((u^i - u^j)^+)²`.
pub fn paradigm_hamiltonian(
    params: &ParadigmShiftParams,
    u: &ValueVector,
    theta: &SimplexVector,
    i: State,
) -> Result<f64> {
    check_two(u.dim())?;
    check_two(theta.dim())?;
    let g = gap(u.as_slice(), i);
    Ok(coupling_raw(params, theta.as_slice(), i) - 0.5 * g * g)
}

/// Generator row at state `i`: `(u^i - u^j)^+` off the diagonal.
pub fn paradigm_rates(u: &ValueVector, i: State) -> Result<[f64; 2]> {
    check_two(u.dim())?;
    let mut out = [0.0; 2];
    write_rates(u.as_slice(), i, &mut out);
    Ok(out)
}

#[inline]
fn write_rates(u: &[f64], i: State, out: &mut [f64]) {
    let g = gap(u, i);
    out[i.index()] = -g;
    out[1 - i.index()] = g;
}

/// The paradigm-shift game as a [`Model`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParadigmShift {
    params: ParadigmShiftParams,
}

impl ParadigmShift {
    pub fn new(params: ParadigmShiftParams) -> Self {
        ParadigmShift { params }
    }

    /// The potential instance `a₁ = 1`, `a₂ = 0`, `r = 1`.
    pub fn reference() -> Self {
        ParadigmShift::new(ParadigmShiftParams::reference())
    }

    pub fn params(&self) -> &ParadigmShiftParams {
        &self.params
    }

    /// Stationary solution `((½, ½), (p, p))` with `k̄ = ½` (reference instance).
    pub fn stationary_solution(p: f64) -> (SimplexVector, ValueVector, f64) {
        (
            SimplexVector::from_trusted(vec![0.5, 0.5]),
            ValueVector::from_trusted(vec![p, p]),
            0.5,
        )
    }

    /// Exact time-dependent solution of the reference instance sampled on
    /// `grid`: `θ ≡ (½, ½)` and `u^i(t) = (T - t)/2 + ū_T^i`.
    ///
    /// Equal components of `u_terminal` are required for this to solve the
    /// system; unequal ones are accepted and give the same formula.
    pub fn analytic_trajectory(grid: TimeGrid, u_terminal: &ValueVector) -> Result<TrajectoryPair> {
        check_two(u_terminal.dim())?;
        let nodes = grid.nodes();
        let n_max = grid.intervals();
        let theta = vec![0.5; nodes * 2];
        let mut u = Vec::with_capacity(nodes * 2);
        for n in 0..nodes {
            for &terminal in u_terminal.as_slice() {
                if n == n_max {
                    u.push(terminal);
                } else {
                    u.push(terminal + 0.5 * (grid.horizon() - grid.time(n)));
                }
            }
        }
        Ok(TrajectoryPair::from_flat_trusted(grid, 2, theta, u))
    }
}

impl Model for ParadigmShift {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, z: &[f64], theta: &[f64], i: State) -> f64 {
        let g = gap(z, i);
        coupling_raw(&self.params, theta, i) - 0.5 * g * g
    }

    fn rates(&self, z: &[f64], _theta: &[f64], i: State, out: &mut [f64]) {
        write_rates(z, i, out);
    }

    fn potential(&self) -> Option<&dyn Potential> {
        if self.params.is_reference() {
            Some(self)
        } else {
            None
        }
    }
}

impl Potential for ParadigmShift {
    fn htilde(&self, z: &[f64], i: State) -> f64 {
        let g = gap(z, i);
        -0.5 * g * g
    }

    fn energy(&self, theta: &[f64]) -> f64 {
        0.5 * theta.iter().map(|t| t * t).sum::<f64>()
    }
}
