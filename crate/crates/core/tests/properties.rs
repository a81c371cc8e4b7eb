mod common;

use common::*;
use mfg_core::stationary::{monotone_bracket, projected_step, StationaryState};
use mfg_core::timedep::{
    an_bracket, deformation_step, h1_weighted_distance, h1n_inner, qa_monotone_bracket, representation_distance,
    Deformation,
};
use mfg_core::{
    project_simplex, solve_elliptic, BoundaryKind, EllipticProblem, Execution, ParadigmShift, SimplexVector, TimeGrid,
    TrajectoryDiff, TrajectoryPair, ValueVector,
};
use proptest::prelude::*;
use rand::Rng;

fn simplex_input(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 2..=max_dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_lands_on_simplex(eta in simplex_input(12)) {
        let r = project_simplex(&eta).unwrap();
        let p = r.projected.as_slice();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for ((&x, &e), &a) in p.iter().zip(&eta).zip(&r.active) {
            prop_assert!((x - (e + r.shift).max(0.0)).abs() <= 1e-12);
            prop_assert_eq!(a, x == 0.0);
        }
    }

    #[test]
    fn projection_is_idempotent(eta in simplex_input(12)) {
        let once = project_simplex(&eta).unwrap().projected;
        let twice = project_simplex(once.as_slice()).unwrap();
        prop_assert_eq!(twice.projected.as_slice(), once.as_slice());
        prop_assert_eq!(twice.shift, 0.0);
    }

    #[test]
    fn projection_is_nonexpansive(pair in (2usize..10).prop_flat_map(|d| (
        prop::collection::vec(-3.0..3.0f64, d),
        prop::collection::vec(-3.0..3.0f64, d),
    ))) {
        let (a, b) = pair;
        let pa = project_simplex(&a).unwrap().projected;
        let pb = project_simplex(&b).unwrap().projected;
        let before: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
        let after: f64 = pa.as_slice().iter().zip(pb.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn projection_commutes_with_uniform_shift(eta in simplex_input(8), c in -2.0..2.0f64) {
        let shifted: Vec<f64> = eta.iter().map(|x| x + c).collect();
        let a = project_simplex(&eta).unwrap().projected;
        let b = project_simplex(&shifted).unwrap().projected;
        prop_assert!(sup_diff(a.as_slice(), b.as_slice()) <= 1e-12);
    }

    #[test]
    fn elliptic_residual_is_small(
        n in 2usize..200,
        horizon in 0.1..20.0f64,
        seed in any::<u64>(),
        terminal in any::<bool>(),
    ) {
        let grid = TimeGrid::new(horizon, n).unwrap();
        let mut r = rng(seed);
        let rhs: Vec<f64> = (0..n - 1).map(|_| r.gen_range(-5.0..5.0)).collect();
        let kind = if terminal { BoundaryKind::TerminalZero } else { BoundaryKind::InitialZero };
        let x = solve_elliptic(&EllipticProblem { grid, rhs: rhs.clone(), kind }).unwrap();
        let c = 1.0 / (grid.dt() * grid.dt());
        let scale = 1.0 + sup(&rhs);
        for k in 1..n {
            let lhs = -c * (x[k + 1] - 2.0 * x[k] + x[k - 1]) + x[k];
            prop_assert!((lhs - rhs[k - 1]).abs() <= 1e-12 * scale * (1.0 + c * sup(&x) / scale));
        }
    }

    #[test]
    fn stationary_flow_keeps_simplex_and_u_sum(seed in any::<u64>(), mu in 0.001..0.4f64) {
        let model = ParadigmShift::reference();
        let mut r = rng(seed);
        let mut s = StationaryState::new(random_simplex(&mut r, 2), random_values(&mut r, 2, 5.0)).unwrap();
        let total: f64 = s.u.as_slice().iter().sum();
        for _ in 0..20 {
            s = projected_step(&model, &s, mu).unwrap().0;
            prop_assert!(s.theta.as_slice().iter().all(|&t| t >= 0.0));
            prop_assert!((s.theta.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        prop_assert!((s.u.as_slice().iter().sum::<f64>() - total).abs() <= 1e-9 * (1.0 + total.abs()));
    }

    #[test]
    fn stationary_bracket_is_dissipative(seed in any::<u64>()) {
        let model = ParadigmShift::reference();
        let mut r = rng(seed);
        let a = StationaryState::new(random_simplex(&mut r, 2), random_values(&mut r, 2, 5.0)).unwrap();
        let b = StationaryState::new(random_simplex(&mut r, 2), random_values(&mut r, 2, 5.0)).unwrap();
        let gap: f64 = a.theta.as_slice().iter().zip(b.theta.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
        prop_assert!(monotone_bracket(&model, &a, &b).unwrap() <= -gap + 1e-10);
    }
}

fn boundary(r: &mut impl Rng) -> (SimplexVector, ValueVector) {
    (random_simplex(r, 2), random_values(r, 2, 2.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deformation_preserves_boundary_and_simplex(seed in any::<u64>(), n in 2usize..40, step in 0.001..0.5f64) {
        let model = ParadigmShift::reference();
        let mut r = rng(seed);
        let (t0, ut) = boundary(&mut r);
        let w = random_trajectory(&mut r, TimeGrid::new(4.0, n).unwrap(), &t0, &ut);
        let next = deformation_step(&model, &w, step).unwrap();
        prop_assert_eq!(next.theta(0), w.theta(0));
        prop_assert_eq!(next.u(n), w.u(n));
        for k in 0..=n {
            let row = next.theta(k);
            prop_assert!(row.iter().all(|&t| t >= 0.0));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn an_bracket_is_nonpositive(seed in any::<u64>(), pick in 0usize..3) {
        let model = ParadigmShift::reference();
        let n = [4, 16, 64][pick];
        let mut r = rng(seed);
        let (t0, ut) = boundary(&mut r);
        let grid = TimeGrid::new(8.0, n).unwrap();
        let a = random_trajectory(&mut r, grid, &t0, &ut);
        let b = random_trajectory(&mut r, grid, &t0, &ut);
        prop_assert!(an_bracket(&model, &a, &b).unwrap() <= 1e-10);
    }

    #[test]
    fn qa_bracket_is_nonpositive(seed in any::<u64>(), pick in 0usize..3) {
        let model = ParadigmShift::reference();
        let n = [4, 16, 64][pick];
        let mut r = rng(seed);
        let (t0, ut) = boundary(&mut r);
        let grid = TimeGrid::new(8.0, n).unwrap();
        let a = random_trajectory(&mut r, grid, &t0, &ut);
        let b = random_trajectory(&mut r, grid, &t0, &ut);
        prop_assert!(qa_monotone_bracket(&model, &a, &b).unwrap() <= 1e-10);
    }

    #[test]
    fn qa_bracket_equals_an_pairing(seed in any::<u64>()) {
        let model = ParadigmShift::reference();
        let mut r = rng(seed);
        let (t0, ut) = boundary(&mut r);
        let grid = TimeGrid::new(3.0, 12).unwrap();
        let a = random_trajectory(&mut r, grid, &t0, &ut);
        let b = random_trajectory(&mut r, grid, &t0, &ut);
        let qa = qa_monotone_bracket(&model, &a, &b).unwrap();
        let an = an_bracket(&model, &a, &b).unwrap();
        // summation by parts against the boundary conditions of φ and ψ
        prop_assert!((qa - grid.dt() * an).abs() <= 1e-9 * (1.0 + an.abs()), "qa {qa}, an {an}");
    }

    /// Away from the clamping regime the projection acts as the same
    /// orthogonal projector at every node, and a small step of the flow
    /// does not separate trajectories.
    #[test]
    fn small_interior_step_does_not_expand(seed in any::<u64>(), step in 0.001..0.01f64, n in 16usize..120) {
        let model = ParadigmShift::reference();
        let mut r = rng(seed);
        let t0 = r.gen_range(0.3..0.7);
        let ut = random_values(&mut r, 2, 2.0);
        let grid = TimeGrid::new(8.0, n).unwrap();
        let a = interior_trajectory(&mut r, grid, t0, &ut);
        let b = interior_trajectory(&mut r, grid, t0, &ut);
        let (a1, b1) = (deformation_step(&model, &a, step).unwrap(), deformation_step(&model, &b, step).unwrap());
        prop_assume!(a1.min_theta() > 0.0 && b1.min_theta() > 0.0);
        let (before, after) = (h1_weighted_distance(&a, &b).unwrap(), h1_weighted_distance(&a1, &b1).unwrap());
        prop_assert!(after <= before + 1e-10, "weighted: before {before}, after {after}");
        let (before, after) = (representation_distance(&a, &b).unwrap(), representation_distance(&a1, &b1).unwrap());
        prop_assert!(after <= before + 1e-10, "representation: before {before}, after {after}");
    }

    #[test]
    fn h1n_polarization(seed in any::<u64>(), n in 2usize..30) {
        let mut r = rng(seed);
        let grid = TimeGrid::new(1.0, n).unwrap();
        let len = grid.nodes() * 3;
        let mut draw = || TrajectoryDiff::from_parts(
            grid,
            3,
            (0..len).map(|_| r.gen_range(-2.0..2.0)).collect(),
            (0..len).map(|_| r.gen_range(-2.0..2.0)).collect(),
        ).unwrap();
        let a = draw();
        let b = draw();
        let sum = a.add(&b).unwrap();
        let diff = a.sub(&b).unwrap();
        let polar = 0.25 * (h1n_inner(&sum, &sum).unwrap() - h1n_inner(&diff, &diff).unwrap());
        let direct = h1n_inner(&a, &b).unwrap();
        prop_assert!((polar - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
    }
}

#[test]
fn weighted_distance_is_quadratic() {
    let grid = TimeGrid::new(5.0, 10).unwrap();
    let theta = SimplexVector::uniform(2).unwrap();
    let base = TrajectoryPair::constant(grid, &theta, &ValueVector::new(vec![0.0, 0.0]).unwrap()).unwrap();
    let off = |c: f64| TrajectoryPair::constant(grid, &theta, &ValueVector::new(vec![c, 0.0]).unwrap()).unwrap();
    let one = h1_weighted_distance(&base, &off(0.3)).unwrap();
    let two = h1_weighted_distance(&base, &off(0.6)).unwrap();
    assert!((two - 4.0 * one).abs() <= 1e-12);
    assert!((one - 10.0 * grid.dt() * 0.09).abs() <= 1e-12);
    assert_eq!(h1_weighted_distance(&base, &base).unwrap(), 0.0);
}

/// The update `w + υ (Φ, Ψ)` contracts and `w - υ (Φ, Ψ)` expands.
#[test]
fn opposite_sign_expands() {
    let model = ParadigmShift::reference();
    let grid = TimeGrid::new(8.0, 60).unwrap();
    let op = Deformation::new(&model, grid, Execution::Sequential);
    let minus = |w: &TrajectoryPair, step: f64| -> TrajectoryPair {
        let f = op.field(w).unwrap();
        let n = grid.intervals();
        let theta = (0..=n)
            .map(|k| {
                if k == 0 {
                    SimplexVector::new(w.theta(0).to_vec()).unwrap()
                } else {
                    let moved: Vec<f64> = w.theta(k).iter().zip(f.psi(k)).map(|(t, p)| t - step * p).collect();
                    project_simplex(&moved).unwrap().projected
                }
            })
            .collect();
        let u = (0..=n)
            .map(|k| {
                let moved = w
                    .u(k)
                    .iter()
                    .zip(f.phi(k))
                    .map(|(u, p)| if k == n { *u } else { u - step * p })
                    .collect();
                ValueVector::new(moved).unwrap()
            })
            .collect();
        TrajectoryPair::new(grid, theta, u).unwrap()
    };
    let mut r = rng(7);
    let mut contracted = 0;
    let mut expanded = 0;
    for _ in 0..20 {
        let t0 = r.gen_range(0.3..0.7);
        let ut = random_values(&mut r, 2, 2.0);
        let a = interior_trajectory(&mut r, grid, t0, &ut);
        let b = interior_trajectory(&mut r, grid, t0, &ut);
        let before = h1_weighted_distance(&a, &b).unwrap();
        let plus = h1_weighted_distance(
            &deformation_step(&model, &a, 0.01).unwrap(),
            &deformation_step(&model, &b, 0.01).unwrap(),
        )
        .unwrap();
        let flipped = h1_weighted_distance(&minus(&a, 0.01), &minus(&b, 0.01)).unwrap();
        contracted += usize::from(plus < before);
        expanded += usize::from(flipped > before);
    }
    assert_eq!(contracted, 20);
    assert_eq!(expanded, 20);
}

#[test]
fn execution_policies_agree_bitwise() {
    let model = ParadigmShift::reference();
    let grid = TimeGrid::new(8.0, 700).unwrap();
    let mut r = rng(11);
    let (t0, ut) = boundary(&mut r);
    let w = random_trajectory(&mut r, grid, &t0, &ut);
    let seq = Deformation::new(&model, grid, Execution::Sequential)
        .step(&w, 0.05)
        .unwrap();
    let par = Deformation::new(&model, grid, Execution::Parallel)
        .step(&w, 0.05)
        .unwrap();
    assert_eq!(seq, par);
}
