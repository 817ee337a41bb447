//! Shooting on the initial data `(u(0), u'(0))`.

use serde::Serialize;

use crate::curve::SolutionCurve;
use crate::error::Result;
use crate::problem::Problem;
use crate::quadrature::Grid;
use crate::tolerances::BLOW_UP_NORM;

#[derive(Clone, Debug, PartialEq)]
pub struct ShootingOutcome {
    /// `u(0) - beta u(eta)`
    pub r1: f64,
    /// `u(T) - alpha int_0^eta u`
    pub r2: f64,
    /// `None` when the trajectory blew up.
    pub curve: Option<SolutionCurve>,
    /// Slope `u'(T)` at the right end.
    pub end_slope: f64,
    /// RK4 steps whose stages saw a negative `u` and clamped it.
    pub clamped: usize,
    pub blew_up: bool,
}

/// Integrates `u'' = -f(t, max(u, 0))`, `u(0) = u0`, `u'(0) = s0` with
/// classical RK4 on the grid and evaluates both boundary residuals.
pub fn shooting_residual(p: &Problem, grid: &Grid, u0: f64, s0: f64) -> Result<ShootingOutcome> {
    let h = grid.step();
    let f = p.f();
    let mut clamped = 0;
    let accel = |t: f64, u: f64, hit: &mut bool| -> Result<f64> {
        if u < 0.0 {
            *hit = true;
        }
        Ok(-f.eval(t, u.max(0.0))?)
    };

    let mut values = Vec::with_capacity(grid.len());
    let (mut u, mut v) = (u0, s0);
    values.push(u);
    for i in 0..grid.len() - 1 {
        let t = grid.node(i);
        let mut hit = false;
        let (k1u, k1v) = (v, accel(t, u, &mut hit)?);
        let (k2u, k2v) = (v + 0.5 * h * k1v, accel(t + 0.5 * h, u + 0.5 * h * k1u, &mut hit)?);
        let (k3u, k3v) = (v + 0.5 * h * k2v, accel(t + 0.5 * h, u + 0.5 * h * k2u, &mut hit)?);
        let (k4u, k4v) = (v + h * k3v, accel(t + h, u + h * k3u, &mut hit)?);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        clamped += usize::from(hit);
        if !(u.abs() <= BLOW_UP_NORM && v.is_finite()) {
            let sign = if u.is_nan() { 1.0 } else { u.signum() };
            return Ok(ShootingOutcome {
                r1: -sign * f64::INFINITY,
                r2: sign * f64::INFINITY,
                curve: None,
                end_slope: v,
                clamped,
                blew_up: true,
            });
        }
        values.push(u);
    }

    let curve = SolutionCurve::new(*grid, values)?;
    let params = p.params();
    let r1 = u0 - params.beta * curve.at(params.eta);
    let r2 = curve.values()[grid.len() - 1] - params.alpha * curve.integral_to(params.eta);
    Ok(ShootingOutcome {
        r1,
        r2,
        curve: Some(curve),
        end_slope: v,
        clamped,
        blew_up: false,
    })
}

pub type Jacobian = [[f64; 2]; 2];

fn residual_vector(p: &Problem, grid: &Grid, x: [f64; 2]) -> Result<[f64; 2]> {
    let o = shooting_residual(p, grid, x[0], x[1])?;
    Ok([o.r1, o.r2])
}

fn fd_steps(x: [f64; 2], rel: f64) -> [f64; 2] {
    [rel * x[0].abs().max(1.0), rel * x[1].abs().max(1.0)]
}

/// Forward-difference Jacobian of `(r1, r2)` with steps `rel * max(1, |x_j|)`.
pub fn jacobian_forward(p: &Problem, grid: &Grid, x: [f64; 2], base: [f64; 2], rel: f64) -> Result<Jacobian> {
    let steps = fd_steps(x, rel);
    let mut j = [[0.0; 2]; 2];
    for col in 0..2 {
        let mut xs = x;
        xs[col] += steps[col];
        let r = residual_vector(p, grid, xs)?;
        for row in 0..2 {
            j[row][col] = (r[row] - base[row]) / steps[col];
        }
    }
    Ok(j)
}

/// Central-difference Jacobian with the same step rule.
pub fn jacobian_central(p: &Problem, grid: &Grid, x: [f64; 2], rel: f64) -> Result<Jacobian> {
    let steps = fd_steps(x, rel);
    let mut j = [[0.0; 2]; 2];
    for col in 0..2 {
        let (mut xp, mut xm) = (x, x);
        xp[col] += steps[col];
        xm[col] -= steps[col];
        let (rp, rm) = (residual_vector(p, grid, xp)?, residual_vector(p, grid, xm)?);
        for row in 0..2 {
            j[row][col] = (rp[row] - rm[row]) / (2.0 * steps[col]);
        }
    }
    Ok(j)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
    /// Stop when `max |r| <= tol * max(1, |u0|, |s0| T)`.
    pub tol: f64,
    /// A stalled iteration still counts as converged below this residual.
    pub accept_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 60,
            max_halvings: 20,
            fd_step: 1e-7,
            tol: 1e-12,
            accept_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShootingSolution {
    pub u0: f64,
    pub s0: f64,
    pub curve: Option<SolutionCurve>,
    pub converged: bool,
    pub iterations: usize,
    /// `max(|r1|, |r2|)` at the returned point.
    pub residual_norm: f64,
    /// Max-norm of the last accepted Newton correction.
    pub last_step: f64,
    pub clamped: usize,
}

fn inf_norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Damped Newton on `(u0, s0)`: full step first, halved up to
/// `max_halvings` times; steps that do not reduce `max |r|` are rejected.
pub fn newton_shoot(p: &Problem, grid: &Grid, start: (f64, f64), opts: &NewtonOptions) -> Result<ShootingSolution> {
    let t_end = grid.t_end();
    let mut x = [start.0, start.1];
    let mut out = shooting_residual(p, grid, x[0], x[1])?;
    let mut r = [out.r1, out.r2];
    let mut last_step = f64::INFINITY;
    let scale = |x: [f64; 2]| 1f64.max(x[0].abs()).max(x[1].abs() * t_end);

    let done = |x: [f64; 2], out: ShootingOutcome, iterations, converged, last_step| ShootingSolution {
        u0: x[0],
        s0: x[1],
        residual_norm: inf_norm([out.r1, out.r2]),
        curve: out.curve,
        converged,
        iterations,
        last_step,
        clamped: out.clamped,
    };

    for it in 0..opts.max_iter {
        let norm = inf_norm(r);
        if norm <= opts.tol * scale(x) {
            return Ok(done(x, out, it, true, last_step));
        }
        if !norm.is_finite() {
            return Ok(done(x, out, it, false, last_step));
        }
        let j = jacobian_forward(p, grid, x, r, opts.fd_step)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            let ok = norm <= opts.accept_tol * scale(x);
            return Ok(done(x, out, it, ok, last_step));
        }
        let dx = [
            (r[0] * j[1][1] - r[1] * j[0][1]) / det,
            (j[0][0] * r[1] - j[1][0] * r[0]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            let o = shooting_residual(p, grid, trial[0], trial[1])?;
            let rn = inf_norm([o.r1, o.r2]);
            if rn.is_finite() && rn < norm {
                accepted = Some((trial, o));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, o)) => {
                last_step = lambda * inf_norm(dx);
                x = trial;
                r = [o.r1, o.r2];
                out = o;
            }
            None => {
                let ok = norm <= opts.accept_tol * scale(x);
                return Ok(done(x, out, it + 1, ok, last_step));
            }
        }
    }
    let ok = inf_norm(r) <= opts.accept_tol * scale(x);
    Ok(done(x, out, opts.max_iter, ok, last_step))
}
