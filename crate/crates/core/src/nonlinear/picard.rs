use serde::Serialize;

use super::operator::{apply_operator_clamped, forcing};
use crate::curve::SolutionCurve;
use crate::error::{Error, Result};
use crate::linear::{residuals, ResidualReport};
use crate::problem::Problem;
use crate::tolerances::{ode_residual_tol, DIVERGENCE_NORM, NONNEGATIVITY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIterations,
    Diverged,
    /// The iteration stopped but the curve fails the residual check.
    ResidualCheckFailed,
    /// Newton could not reduce the shooting residual.
    Stalled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointResult {
    pub curve: SolutionCurve,
    pub converged: bool,
    pub status: Status,
    pub iterations: usize,
    pub final_update_norm: f64,
    pub residuals: ResidualReport,
    /// Nodes where a negative iterate was clamped before evaluating `f`.
    pub clamp_events: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub residual_tol: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            tol: 1e-10,
            max_iter: 500,
            residual_tol: 1e-8,
        }
    }
}

/// Residuals of `u` against its own forcing `f(., u)`, and whether they
/// pass the ODE bound of [`ode_residual_tol`] and `bc <= residual_tol`.
pub fn verify_solution(p: &Problem, u: &SolutionCurve, residual_tol: f64) -> Result<(ResidualReport, bool)> {
    let (y, _) = forcing(p, u)?;
    let r = residuals(p.params(), u, &y)?;
    let ok = r.within(ode_residual_tol(u.step(), y.values()), residual_tol);
    Ok((r, ok))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &Problem,
    curve: SolutionCurve,
    stopped: bool,
    status: Status,
    iterations: usize,
    final_update_norm: f64,
    clamp_events: usize,
    opts: &IterationOptions,
) -> Result<FixedPointResult> {
    let (residuals, ok) = verify_solution(p, &curve, opts.residual_tol)?;
    let (converged, status) = match (stopped, ok) {
        (true, true) => (true, Status::Converged),
        (true, false) => (false, Status::ResidualCheckFailed),
        (false, _) => (false, status),
    };
    Ok(FixedPointResult {
        curve,
        converged,
        status,
        iterations,
        final_update_norm,
        residuals,
        clamp_events,
    })
}

fn check_start(u0: &SolutionCurve) -> Result<()> {
    match u0
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| **v < -NONNEGATIVITY_TOL)
    {
        Some((i, v)) => Err(Error::NegativeState {
            t: u0.grid().node(i),
            u: *v,
        }),
        None => Ok(()),
    }
}

/// Plain fixed-point iteration `u_{k+1} = A u_k`.
pub fn picard_iterate(p: &Problem, u0: &SolutionCurve, opts: &IterationOptions) -> Result<FixedPointResult> {
    check_start(u0)?;
    let mut u = u0.clone();
    let mut clamps = 0;
    let mut update = f64::INFINITY;
    for k in 1..=opts.max_iter {
        let (next, c) = apply_operator_clamped(p, &u)?;
        clamps += c;
        update = next.sup_distance(&u)?;
        u = next;
        if update <= opts.tol {
            return finish(p, u, true, Status::Converged, k, update, clamps, opts);
        }
        if u.norm() > DIVERGENCE_NORM {
            return finish(p, u, false, Status::Diverged, k, update, clamps, opts);
        }
    }
    finish(p, u, false, Status::MaxIterations, opts.max_iter, update, clamps, opts)
}

/// Dominant eigenpair of the Jacobian of `A` at `u`, by power iteration on
/// finite-difference Jacobian-vector products. The vector has unit
/// Euclidean norm over the nodes.
pub fn dominant_mode(p: &Problem, u: &SolutionCurve) -> Result<(Vec<f64>, f64)> {
    let n = u.values().len();
    let (base, _) = apply_operator_clamped(p, u)?;
    let scale = 1e-7 * u.norm().max(1.0);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut mu = 0.0;
    for _ in 0..60 {
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let eps = scale / vmax;
        let shifted = SolutionCurve::new(
            *u.grid(),
            u.values().iter().zip(&v).map(|(a, b)| a + eps * b).collect(),
        )?;
        let (image, _) = apply_operator_clamped(p, &shifted)?;
        let w: Vec<f64> = image
            .values()
            .iter()
            .zip(base.values())
            .map(|(a, b)| (a - b) / eps)
            .collect();
        let next_mu: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wn == 0.0 {
            return Ok((v, 0.0));
        }
        v = w.into_iter().map(|x| x / wn).collect();
        let settled = (next_mu - mu).abs() <= 1e-10 * next_mu.abs().max(1e-3);
        mu = next_mu;
        if settled {
            break;
        }
    }
    Ok((v, mu))
}

/// Fixed-point iteration stabilized on the dominant mode.
///
/// Plain iteration of `A` cannot settle on a fixed point whose Jacobian has
/// an eigenvalue of modulus above one. Here the component along the
/// dominant eigenvector `q` takes a one-dimensional Newton step
/// `z + <q, Au - u> / (1 - mu)` while the complement keeps the plain
/// update. With `|mu| < 1/2` this reduces to plain iteration.
pub fn stabilized_fixed_point(
    p: &Problem,
    u0: &SolutionCurve,
    opts: &IterationOptions,
) -> Result<FixedPointResult> {
    check_start(u0)?;
    let mut u = u0.clone();
    let mut clamps = 0;
    let mut update = f64::INFINITY;
    let (mut q, mut mu) = dominant_mode(p, &u)?;
    for k in 1..=opts.max_iter {
        let (au, c) = apply_operator_clamped(p, &u)?;
        clamps += c;
        let next = if mu.abs() < 0.5 || (1.0 - mu).abs() < 1e-6 {
            au
        } else {
            let dot = |a: &[f64]| -> f64 { a.iter().zip(&q).map(|(x, y)| x * y).sum() };
            let along_u = dot(u.values());
            let along_au = dot(au.values());
            let z = along_u + (along_au - along_u) / (1.0 - mu);
            let values = au
                .values()
                .iter()
                .zip(&q)
                .map(|(a, qi)| a + (z - along_au) * qi)
                .collect();
            SolutionCurve::new(*u.grid(), values)?
        };
        update = next.sup_distance(&u)?;
        u = next;
        if update <= opts.tol {
            return finish(p, u, true, Status::Converged, k, update, clamps, opts);
        }
        if u.norm() > DIVERGENCE_NORM {
            return finish(p, u, false, Status::Diverged, k, update, clamps, opts);
        }
        if k % 10 == 0 {
            (q, mu) = dominant_mode(p, &u)?;
        }
    }
    finish(p, u, false, Status::MaxIterations, opts.max_iter, update, clamps, opts)
}
