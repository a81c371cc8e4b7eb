//! Independent reference implementations and random inputs for the
//! integration tests.

#![allow(dead_code)]

use mfg_core::models::ParadigmShiftParams;
use mfg_core::{BoundaryKind, SimplexVector, TimeGrid, TrajectoryPair, ValueVector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Projection by enumerating supports: on a support `S` the KKT point is
/// `η_S + λ` with `λ = (1 - Σ η_S)/|S|`; keep the feasible one closest to `η`.
pub fn qp_project(eta: &[f64]) -> Vec<f64> {
    let d = eta.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << d) {
        let support: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
        let lambda = (1.0 - support.iter().map(|&i| eta[i]).sum::<f64>()) / support.len() as f64;
        let mut x = vec![0.0; d];
        for &i in &support {
            x[i] = eta[i] + lambda;
        }
        if x.iter().any(|&v| v < -1e-13) {
            continue;
        }
        let dist: f64 = x.iter().zip(eta).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, x));
        }
    }
    best.expect("the vertex supports are always feasible").1
}

/// Dense assembly of the full `(N+1)`-node system, boundary rows included,
/// solved by LU.
pub fn dense_elliptic(grid: TimeGrid, kind: BoundaryKind, rhs: &[f64]) -> Vec<f64> {
    let n = grid.intervals();
    let c = 1.0 / (grid.dt() * grid.dt());
    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut b = DVector::<f64>::zeros(n + 1);
    for k in 1..n {
        a[(k, k - 1)] = -c;
        a[(k, k)] = 1.0 + 2.0 * c;
        a[(k, k + 1)] = -c;
        b[k] = rhs[k - 1];
    }
    match kind {
        BoundaryKind::TerminalZero => {
            a[(0, 0)] = 1.0;
            a[(0, 1)] = -1.0;
            a[(n, n)] = 1.0;
        }
        BoundaryKind::InitialZero => {
            a[(0, 0)] = 1.0;
            a[(n, n)] = 1.0;
            a[(n, n - 1)] = -1.0;
        }
    }
    a.lu()
        .solve(&b)
        .expect("the system is nonsingular")
        .iter()
        .copied()
        .collect()
}

/// Grid search of `min_{μ ≥ 0} ½ μ² + μ z` over `μ ∈ [0, 10]`, step `1e-4`.
/// Returns the minimum and the minimizer.
pub fn legendre_1d(z: f64) -> (f64, f64) {
    let steps = 100_000;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=steps {
        let mu = 10.0 * k as f64 / steps as f64;
        let value = 0.5 * mu * mu + mu * z;
        if value < best.0 {
            best = (value, mu);
        }
    }
    best
}

/// Hamiltonian and generator row of the two-state paradigm-shift game via
/// the Legendre transform of `c(i, θ, μ) = f(i, θ) + ½ Σ_{j≠i} μ_j²`.
pub fn legendre_paradigm(params: &ParadigmShiftParams, u: &[f64], theta: &[f64], i: usize) -> (f64, [f64; 2]) {
    let a = if i == 0 { params.a1() } else { params.a2() };
    let r = params.r();
    let f = (a * theta[0].powf(r) + (1.0 - a) * theta[1].powf(r)).powf(1.0 / r);
    let j = 1 - i;
    let (value, mu) = legendre_1d(u[j] - u[i]);
    let mut row = [0.0; 2];
    row[j] = mu;
    row[i] = -mu;
    (f + value, row)
}

pub fn random_simplex(rng: &mut impl Rng, d: usize) -> SimplexVector {
    let w: Vec<f64> = (0..d)
        .map(|_| {
            if rng.gen_bool(0.1) {
                0.0
            } else {
                rng.gen_range(0.0..1.0)
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return SimplexVector::uniform(d).unwrap();
    }
    let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
    let drift = 1.0 - p.iter().sum::<f64>();
    let top = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    p[top] += drift;
    SimplexVector::new(p).unwrap()
}

pub fn random_values(rng: &mut impl Rng, d: usize, scale: f64) -> ValueVector {
    ValueVector::new((0..d).map(|_| rng.gen_range(-scale..scale)).collect()).unwrap()
}

/// Random trajectory with the given boundary data.
pub fn random_trajectory(
    rng: &mut impl Rng,
    grid: TimeGrid,
    theta0: &SimplexVector,
    u_terminal: &ValueVector,
) -> TrajectoryPair {
    let d = theta0.dim();
    let n = grid.intervals();
    let mut theta = Vec::with_capacity(grid.nodes());
    let mut u = Vec::with_capacity(grid.nodes());
    for k in 0..=n {
        theta.push(if k == 0 { theta0.clone() } else { random_simplex(rng, d) });
        u.push(if k == n {
            u_terminal.clone()
        } else {
            random_values(rng, d, 3.0)
        });
    }
    TrajectoryPair::new(grid, theta, u).unwrap()
}

/// Smooth random trajectory with boundary data drawn from `rng`, every
/// distribution slice in `[0.1, 0.9]`.
pub fn interior_trajectory(
    rng: &mut impl Rng,
    grid: TimeGrid,
    theta0: f64,
    u_terminal: &ValueVector,
) -> TrajectoryPair {
    let theta0 = SimplexVector::new(vec![theta0, 1.0 - theta0]).unwrap();
    smooth_with_amplitude(rng, grid, &theta0, u_terminal, 0.2)
}

/// Smooth random trajectory: sums of a few low-frequency modes.
pub fn smooth_trajectory(
    rng: &mut impl Rng,
    grid: TimeGrid,
    theta0: &SimplexVector,
    u_terminal: &ValueVector,
) -> TrajectoryPair {
    smooth_with_amplitude(rng, grid, theta0, u_terminal, 0.4)
}

fn smooth_with_amplitude(
    rng: &mut impl Rng,
    grid: TimeGrid,
    theta0: &SimplexVector,
    u_terminal: &ValueVector,
    amplitude: f64,
) -> TrajectoryPair {
    let n = grid.intervals();
    let (a, b, w) = (
        rng.gen_range(-amplitude..amplitude),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(0.5..3.0),
    );
    let mut theta = Vec::with_capacity(grid.nodes());
    let mut u = Vec::with_capacity(grid.nodes());
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let bump = (std::f64::consts::PI * s).sin();
        if k == 0 {
            theta.push(theta0.clone());
        } else {
            let t = theta0.as_slice();
            let shifted = [t[0] + a * bump, t[1] - a * bump];
            theta.push(mfg_core::project_simplex(&shifted).unwrap().projected);
        }
        if k == n {
            u.push(u_terminal.clone());
        } else {
            let ut = u_terminal.as_slice();
            let wave = b * (1.0 - s) * (w * s).cos();
            u.push(ValueVector::new(vec![ut[0] + wave, ut[1] - 0.5 * wave]).unwrap());
        }
    }
    TrajectoryPair::new(grid, theta, u).unwrap()
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
