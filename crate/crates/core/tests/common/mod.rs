#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tpbvp_core::{Grid, Params, SolutionCurve};

/// Parameters with `0 < eta < T`, `0 < alpha < 2T/eta^2` and
/// `0 <= beta < beta_bound`, kept away from the singular edge.
pub fn random_params(rng: &mut ChaCha8Rng) -> Params<f64> {
    let t_end = rng.gen_range(0.5..3.0);
    let eta = t_end * rng.gen_range(0.05..0.95);
    let alpha = rng.gen_range(0.02..0.95) * 2.0 * t_end / (eta * eta);
    let mut p = Params::new(t_end, eta, alpha, 0.0);
    p.beta = rng.gen_range(0.0..0.95) * p.beta_bound();
    p
}

/// A smooth nonnegative forcing: a positive mix of bumps and polynomials.
pub fn random_forcing(rng: &mut ChaCha8Rng, grid: Grid) -> SolutionCurve {
    let t_end = grid.t_end();
    let c0: f64 = rng.gen_range(0.0..2.0);
    let c1: f64 = rng.gen_range(0.0..2.0);
    let c2: f64 = rng.gen_range(0.0..2.0);
    let centre = rng.gen_range(0.0..t_end);
    let width = rng.gen_range(0.05..0.5) * t_end;
    let freq = rng.gen_range(0.5..4.0);
    SolutionCurve::from_fn(grid, |t| {
        let s = t / t_end;
        c0 * (1.0 + (freq * t).sin()) + c1 * s * s + c2 * (-((t - centre) / width).powi(2)).exp()
    })
    .unwrap()
}

/// A random element of the cone: nonnegative and concave on `[0, T]`.
pub fn random_cone_element(rng: &mut ChaCha8Rng, grid: Grid, scale: f64) -> SolutionCurve {
    let t_end = grid.t_end();
    let base = rng.gen_range(0.0..1.0) * scale;
    let bump = rng.gen_range(0.0..1.0) * scale;
    let peak = rng.gen_range(0.0..t_end);
    let slope: f64 = rng.gen_range(-0.5..0.5) * scale / t_end;
    let floor = base - slope.min(0.0) * t_end;
    // |t - peak| <= T keeps the parabola nonnegative.
    SolutionCurve::from_fn(grid, |t| floor + slope * t + bump * (1.0 - ((t - peak) / t_end).powi(2)))
    .unwrap()
}
