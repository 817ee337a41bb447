mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpbvp_core::nonlinear::*;
use tpbvp_core::number::Number;
use tpbvp_core::tolerances::{ode_residual_tol, ROUTE_AGREEMENT_TOL};
use tpbvp_core::{presets, FunctionSpec, Grid, Problem, SolutionCurve};

fn zero_f(p: &Problem) -> Problem {
    p.with_f(FunctionSpec::constant(Number::integer(0)).unwrap())
}

/// The operator written out term by term, each integral taken separately.
fn operator_by_formula(p: &Problem, u: &SolutionCurve) -> SolutionCurve {
    let pr = p.params();
    let (t_end, eta, alpha, beta) = (pr.t_end, pr.eta, pr.alpha, pr.beta);
    let grid = *u.grid();
    let y: Vec<f64> = grid.nodes().zip(u.values()).map(|(t, v)| p.f().eval(t, *v).unwrap()).collect();
    let weighted = |w: &dyn Fn(f64) -> f64| -> Vec<f64> { grid.nodes().zip(&y).map(|(s, v)| w(s) * v).collect() };
    let i1 = grid.integrate_to(&weighted(&|s| eta - s), eta);
    let i2 = grid.integrate_to(&weighted(&|s| (eta - s).powi(2)), eta);
    let i3 = grid.integral(&weighted(&|s| t_end - s));
    let lambda = 2.0 * t_end - alpha * eta * eta + beta * (2.0 * eta - alpha * eta * eta - 2.0 * t_end);
    let values = grid
        .nodes()
        .enumerate()
        .map(|(i, t)| {
            let v = grid.cumulative(&weighted(&|s| t - s))[i];
            -(beta * (2.0 * t_end - alpha * eta * eta) - 2.0 * beta * (1.0 - alpha * eta) * t) / lambda * i1
                - (alpha * beta * eta - alpha * (beta - 1.0) * t) / lambda * i2
                - (2.0 * (beta - 1.0) * t - 2.0 * beta * eta) / lambda * i3
                - v
        })
        .collect();
    SolutionCurve::new(grid, values).unwrap()
}

#[test]
fn operator_delegation_matches_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [presets::first_problem(), presets::second_problem()] {
        let grid = Grid::new(p.t_end(), 129).unwrap();
        for _ in 0..10 {
            let u = common::random_cone_element(&mut rng, grid, 20.0);
            let a = apply_operator(&p, &u).unwrap();
            let b = operator_by_formula(&p, &u);
            assert!(a.sup_distance(&b).unwrap() <= 1e-12 * a.norm().max(1.0));
        }
    }
}

#[test]
fn operator_simple_cases() {
    let p = presets::first_problem();
    let grid = Grid::new(1.0, 257).unwrap();
    assert_eq!(apply_operator(&zero_f(&p), &SolutionCurve::constant(grid, 1.0).unwrap()).unwrap().norm(), 0.0);
    assert_eq!(apply_operator(&p, &SolutionCurve::zeros(grid)).unwrap().norm(), 0.0);
    let au = apply_operator(&p, &SolutionCurve::constant(grid, 1.0).unwrap()).unwrap();
    assert!(au.values().iter().all(|v| *v > 0.0));
    let neg = SolutionCurve::constant(grid, -1e-6).unwrap();
    assert!(apply_operator(&p, &neg).is_err());
}

#[test]
fn operator_preserves_the_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [presets::first_problem(), presets::second_problem()] {
        let grid = Grid::new(p.t_end(), 513).unwrap();
        for i in 0..100 {
            let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
            let u = common::random_cone_element(&mut rng, grid, scale);
            assert!(cone_membership(&u).member);
            let au = apply_operator(&p, &u).unwrap();
            let c = cone_membership(&au);
            assert!(c.member, "case {i}: {c:?}");
        }
    }
}

#[test]
fn psi_is_concave_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = Grid::new(1.0, 65).unwrap();
    for _ in 0..50 {
        let u = common::random_cone_element(&mut rng, grid, 5.0);
        let v = common::random_cone_element(&mut rng, grid, 5.0);
        let mid = u.scaled(0.5).unwrap().axpy(0.5, &v).unwrap();
        assert!(psi(&mid) >= 0.5 * psi(&u) + 0.5 * psi(&v) - 1e-15);
        assert!(psi(&u) <= u.norm());
    }
}

#[test]
fn picard_zero_function_converges_at_once() {
    let p = zero_f(&presets::first_problem());
    let grid = Grid::new(1.0, 129).unwrap();
    let r = picard_iterate(&p, &SolutionCurve::constant(grid, 1.0).unwrap(), &IterationOptions::default()).unwrap();
    assert!(r.converged);
    assert_eq!(r.curve.norm(), 0.0);
    assert!(r.iterations <= 2);
}

#[test]
fn picard_on_first_example() {
    let p = presets::first_problem();
    let grid = Grid::new(1.0, 2049).unwrap();
    let opts = IterationOptions::default();
    let small = picard_iterate(&p, &SolutionCurve::constant(grid, 0.001).unwrap(), &opts).unwrap();
    assert!(small.converged && small.curve.norm() < 1.0 / 120.0);
    let large = picard_iterate(&p, &SolutionCurve::constant(grid, 50.0).unwrap(), &opts).unwrap();
    assert!(large.converged, "{:?}", large.status);
    let (y, _) = forcing(&p, &large.curve).unwrap();
    assert!(large.residuals.within(ode_residual_tol(grid.step(), y.values()), 1e-8));
    assert!((large.curve.norm() - 12.0504).abs() < 1e-3);
}

#[test]
fn picard_point_agrees_with_shooting() {
    let p = presets::first_problem();
    let grid = Grid::new(1.0, 2049).unwrap();
    let r = picard_iterate(&p, &SolutionCurve::constant(grid, 50.0).unwrap(), &IterationOptions::default()).unwrap();
    let u0 = r.curve.values()[0];
    let s0 = initial_slope(&p, &r.curve).unwrap();
    let o = shooting_residual(&p, &grid, u0, s0).unwrap();
    assert!(o.r1.abs() < 1e-6 && o.r2.abs() < 1e-6, "{o:?}");
}

#[test]
fn stabilized_iteration_reaches_the_unstable_solution() {
    let p = presets::first_problem();
    let grid = Grid::new(1.0, 1025).unwrap();
    let sol = newton_shoot(&p, &grid, (0.045, 0.16), &NewtonOptions::default()).unwrap();
    assert!(sol.converged);
    let curve = sol.curve.unwrap();
    let (_, mu) = dominant_mode(&p, &curve).unwrap();
    assert!(mu > 1.5, "dominant eigenvalue {mu}");
    // From a nearby start plain iteration drifts away; the stabilized one
    // comes back.
    let opts = IterationOptions::default();
    let nearby = curve.scaled(1.01).unwrap();
    let plain = picard_iterate(&p, &nearby, &opts).unwrap();
    assert!(plain.curve.sup_distance(&curve).unwrap() > 1e-2);
    let kept = stabilized_fixed_point(&p, &nearby, &opts).unwrap();
    assert!(kept.converged);
    assert!(kept.curve.sup_distance(&curve).unwrap() < ROUTE_AGREEMENT_TOL);
}

#[test]
fn forward_jacobian_converges_to_central() {
    let p = presets::first_problem();
    let grid = Grid::new(1.0, 513).unwrap();
    let x = [1.0, 3.0];
    let o = shooting_residual(&p, &grid, x[0], x[1]).unwrap();
    let reference = jacobian_central(&p, &grid, x, 1e-5).unwrap();
    let err = |rel: f64| {
        let j = jacobian_forward(&p, &grid, x, [o.r1, o.r2], rel).unwrap();
        let mut e: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                e = e.max((j[r][c] - reference[r][c]).abs());
            }
        }
        e
    };
    let (e1, e2) = (err(1e-3), err(5e-4));
    let ratio = e1 / e2;
    assert!((1.6..2.4).contains(&ratio), "first-order ratio {ratio} ({e1}, {e2})");
}

#[test]
fn zero_function_has_only_the_zero_solution() {
    let p = zero_f(&presets::first_problem());
    let cfg = SolveConfig {
        grid_n: 257,
        ..SolveConfig::default()
    };
    let set = find_solutions(&p, None, &cfg).unwrap();
    assert_eq!(set.solutions.len(), 1);
    assert!(set.solutions[0].curve().norm() < 1e-10);
}

#[test]
fn first_example_has_three_labelled_solutions() {
    let p = presets::first_problem();
    let tt = presets::first_thresholds();
    let set = find_solutions(&p, Some(&tt), &SolveConfig::default()).unwrap();
    let mut labels: Vec<Label> = set.solutions.iter().map(|s| s.class.unwrap().label).collect();
    labels.sort_by_key(|l| *l as u8);
    assert_eq!(labels, vec![Label::Small, Label::LargeMin, Label::Middle]);
    for s in &set.solutions {
        assert!(s.result.converged && s.cone.member);
        assert_eq!(s.sources, vec![Source::Picard, Source::Shooting]);
        assert!(s.route_distance.unwrap() <= ROUTE_AGREEMENT_TOL);
    }
    for (i, a) in set.solutions.iter().enumerate() {
        for b in &set.solutions[i + 1..] {
            assert!(a.curve().sup_distance(b.curve()).unwrap() > 1e-3);
        }
    }
}

#[test]
fn second_example_has_two_solutions() {
    let p = presets::second_problem();
    let set = find_solutions(&p, Some(&presets::second_thresholds()), &SolveConfig::default()).unwrap();
    assert!(set.solutions.len() >= 2);
    for s in &set.solutions {
        assert!(s.result.converged && s.cone.member);
    }
}
