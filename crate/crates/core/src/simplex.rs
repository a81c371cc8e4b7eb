//! Euclidean projection onto the probability simplex.
//!
//! The projection of `η` is `(η^i + ξ)^+` with the shift `ξ` chosen so the
//! entries sum to one. `ξ` is found exactly by sorting: with `y` sorted in
//! decreasing order, the support is the longest prefix `1..=k` for which
//! `y_k + (1 - Σ_{j≤k} y_j)/k > 0`, and `ξ = (1 - Σ_{j≤k} y_j)/k`.

use crate::error::{MfgError, Result};
use crate::types::{is_on_simplex, SimplexVector};

/// Output of [`project_simplex`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub projected: SimplexVector,
    /// Shift `ξ` with `projected[i] = (input[i] + ξ)^+`.
    pub shift: f64,
    /// Entries clamped to zero.
    pub active: Vec<bool>,
}

impl ProjectionResult {
    pub fn any_active(&self) -> bool {
        self.active.iter().any(|&a| a)
    }
}

/// Projects `eta` onto the probability simplex.
///
/// A vector that already satisfies the simplex invariants is returned
/// unchanged with `ξ = 0`.
pub fn project_simplex(eta: &[f64]) -> Result<ProjectionResult> {
    if eta.len() < 2 {
        return Err(MfgError::DimensionTooSmall(eta.len()));
    }
    if let Some(index) = eta.iter().position(|x| !x.is_finite()) {
        return Err(MfgError::NonFinite {
            index,
            value: eta[index],
        });
    }
    let mut out = vec![0.0; eta.len()];
    let mut active = vec![false; eta.len()];
    let shift = project_into(eta, &mut out, &mut active);
    Ok(ProjectionResult {
        projected: SimplexVector::from_trusted(out),
        shift,
        active,
    })
}

/// Non-allocating kernel for finite input of length ≥ 2. Returns `ξ`.
pub(crate) fn project_into(eta: &[f64], out: &mut [f64], active: &mut [bool]) -> f64 {
    if is_on_simplex(eta) {
        out.copy_from_slice(eta);
        active.fill(false);
        return 0.0;
    }
    let shift = simplex_shift(eta);
    for ((o, a), &x) in out.iter_mut().zip(active.iter_mut()).zip(eta) {
        let v = x + shift;
        if v > 0.0 {
            *o = v;
            *a = false;
        } else {
            *o = 0.0;
            *a = true;
        }
    }
    shift
}

fn simplex_shift(eta: &[f64]) -> f64 {
    let mut sorted = eta.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut shift = 1.0 - sorted[0];
    for (k, &y) in sorted.iter().enumerate() {
        prefix += y;
        let candidate = (1.0 - prefix) / (k + 1) as f64;
        if y + candidate > 0.0 {
            shift = candidate;
        } else {
            break;
        }
    }
    shift
}
