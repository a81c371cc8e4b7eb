//! Discrete screened-Poisson solves `(-δ²/δt² + I) x = b` on a uniform time
//! grid with mixed boundary conditions.
//!
//! The unknowns are the interior nodes `x_1..x_{N-1}`. The Neumann-like
//! identity (`x_1 = x_0` or `x_N = x_{N-1}`) is folded into the first or
//! last row, which leaves a symmetric, strictly diagonally dominant
//! tridiagonal system solved by the Thomas recurrence.

use crate::error::{MfgError, Result};
use crate::types::{TimeGrid, ValueVector};

/// Boundary conditions of the two representation problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// `x_N = 0` and `x_1 = x_0`.
    TerminalZero,
    /// `x_0 = 0` and `x_N = x_{N-1}`.
    InitialZero,
}

/// A single scalar problem: right-hand side on the interior nodes `1..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticProblem {
    pub grid: TimeGrid,
    pub rhs: Vec<f64>,
    pub kind: BoundaryKind,
}

/// Thomas factorization for one `(grid, kind)` pair.
#[derive(Debug, Clone)]
pub struct EllipticSolver {
    grid: TimeGrid,
    kind: BoundaryKind,
    /// `1/δt²`, the magnitude of the off-diagonal entries.
    coupling: f64,
    inv_pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl EllipticSolver {
    pub fn new(grid: TimeGrid, kind: BoundaryKind) -> Self {
        let m = grid.intervals() - 1;
        let c = 1.0 / (grid.dt() * grid.dt());
        let diag = |k: usize| {
            let mut b = 1.0 + 2.0 * c;
            match kind {
                BoundaryKind::TerminalZero if k == 0 => b -= c,
                BoundaryKind::InitialZero if k == m - 1 => b -= c,
                _ => {}
            }
            b
        };
        let mut inv_pivot = Vec::with_capacity(m);
        let mut upper = Vec::with_capacity(m);
        let mut prev_upper = 0.0;
        for k in 0..m {
            // sub-diagonal entry is -c, so the pivot is b_k - c * (c / pivot_{k-1})
            let pivot = diag(k) - if k == 0 { 0.0 } else { c * prev_upper };
            let inv = 1.0 / pivot;
            inv_pivot.push(inv);
            prev_upper = c * inv;
            upper.push(prev_upper);
        }
        EllipticSolver {
            grid,
            kind,
            coupling: c,
            inv_pivot,
            upper,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    /// Solves for the `N + 1` nodal values given `N - 1` interior entries.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.grid.intervals() - 1;
        if rhs.len() != m {
            return Err(MfgError::RhsLength {
                expected: m,
                got: rhs.len(),
            });
        }
        let mut x = vec![0.0; m + 2];
        self.solve_strided(|k| rhs[k], &mut x, 0, 1);
        Ok(x)
    }

    /// Solves with `rhs(k)` giving the interior entry `k = 0..N-2` and writes
    /// node `n` into `out[offset + n * stride]`.
    pub(crate) fn solve_strided<F>(&self, rhs: F, out: &mut [f64], offset: usize, stride: usize)
    where
        F: Fn(usize) -> f64,
    {
        let m = self.inv_pivot.len();
        let c = self.coupling;
        let at = |n: usize| offset + n * stride;
        // forward sweep, stored in the interior slots
        let mut carry = 0.0;
        for k in 0..m {
            carry = (rhs(k) + c * carry) * self.inv_pivot[k];
            out[at(k + 1)] = carry;
        }
        for k in (0..m.saturating_sub(1)).rev() {
            let next = out[at(k + 2)];
            out[at(k + 1)] += self.upper[k] * next;
        }
        match self.kind {
            BoundaryKind::TerminalZero => {
                out[at(0)] = out[at(1)];
                out[at(m + 1)] = 0.0;
            }
            BoundaryKind::InitialZero => {
                out[at(0)] = 0.0;
                out[at(m + 1)] = out[at(m)];
            }
        }
    }
}

/// Solves one scalar problem.
pub fn solve_elliptic(problem: &EllipticProblem) -> Result<Vec<f64>> {
    EllipticSolver::new(problem.grid, problem.kind).solve(&problem.rhs)
}

/// Applies [`solve_elliptic`] independently to each state coordinate.
///
/// `rhs` holds the interior nodes `1..N-1`.
pub fn solve_elliptic_vector(grid: TimeGrid, rhs: &[ValueVector], kind: BoundaryKind) -> Result<Vec<ValueVector>> {
    let m = grid.intervals() - 1;
    if rhs.len() != m {
        return Err(MfgError::RhsLength {
            expected: m,
            got: rhs.len(),
        });
    }
    let dim = rhs.first().map_or(0, ValueVector::dim);
    if let Some(bad) = rhs.iter().find(|r| r.dim() != dim) {
        return Err(MfgError::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }
    let solver = EllipticSolver::new(grid, kind);
    let mut flat = vec![0.0; grid.nodes() * dim];
    for i in 0..dim {
        solver.solve_strided(|k| rhs[k].as_slice()[i], &mut flat, i, dim);
    }
    Ok(flat
        .chunks(dim.max(1))
        .map(|c| ValueVector::from_trusted(c.to_vec()))
        .collect())
}
