//! The linear problem `u'' + y = 0` with the three-point integral boundary
//! conditions.
//!
//! [`solve_linear`] evaluates the closed-form Green representation;
//! [`solve_linear_oracle`] builds the same solution independently from
//! `u(t) = u(0) + u'(0) t - int_0^t (t - s) y(s) ds` and a 2x2 solve for the
//! initial data.

use serde::Serialize;

use crate::curve::SolutionCurve;
use crate::error::{Error, Result};
use crate::number::Scalar;
use crate::problem::{lambda_constant, Params};
use crate::quadrature::Grid;
use crate::tolerances::{GAMMA_BOUND_TOL, NONNEGATIVITY_TOL, SINGULAR_TOL};

/// Denominator of the closed form as usually written,
/// `(alpha eta^2 - 2T) - beta (2 eta - alpha eta^2 - 2T)`. It equals
/// `-Lambda`; only `Lambda` is evaluated.
pub fn green_denominator<S: Scalar>(p: &Params<S>) -> S {
    -lambda_constant(p)
}

/// The integrals of `y` that the closed form needs.
#[derive(Clone, Debug)]
pub struct Moments {
    /// `int_0^eta (eta - s) y(s) ds`
    pub near: f64,
    /// `int_0^eta (eta - s)^2 y(s) ds`
    pub near_sq: f64,
    /// `int_0^T (T - s) y(s) ds`
    pub full: f64,
    /// `V(t_i) = int_0^{t_i} (t_i - s) y(s) ds` at every node.
    pub volterra: Vec<f64>,
}

impl Moments {
    pub fn compute(grid: &Grid, y: &[f64], eta: f64) -> Moments {
        let t_end = grid.t_end();
        let weighted = |w: &dyn Fn(f64) -> f64| -> Vec<f64> {
            grid.nodes().zip(y).map(|(s, v)| w(s) * v).collect()
        };
        let near_w = weighted(&|s| eta - s);
        let near_sq_w = weighted(&|s| (eta - s) * (eta - s));
        let full_w = weighted(&|s| t_end - s);
        let moment = weighted(&|s| s);

        let c0 = grid.cumulative(y);
        let c1 = grid.cumulative(&moment);
        let volterra = grid
            .nodes()
            .zip(c0.iter().zip(&c1))
            .map(|(t, (a, b))| t * a - b)
            .collect();

        Moments {
            near: grid.integrate_to(&near_w, eta),
            near_sq: grid.integrate_to(&near_sq_w, eta),
            full: grid.integral(&full_w),
            volterra,
        }
    }
}

fn check_curve_grid(p: &Params<f64>, y: &SolutionCurve) -> Result<()> {
    let t_end = y.t_end();
    if (t_end - p.t_end).abs() > 1e-12 * p.t_end.abs().max(1.0) {
        return Err(Error::Shape(format!(
            "curve spans [0, {t_end}] but T = {}",
            p.t_end
        )));
    }
    Ok(())
}

/// Closed-form solution with `Lambda` as the single denominator:
///
/// ```text
/// u(t) = -[ (beta(2T - alpha eta^2) - 2 beta (1 - alpha eta) t) I1
///         + (alpha beta eta - alpha (beta - 1) t) I2
///         + (2 (beta - 1) t - 2 beta eta) I3 ] / Lambda  -  V(t)
/// ```
pub fn solve_linear(p: &Params<f64>, y: &SolutionCurve) -> Result<SolutionCurve> {
    check_curve_grid(p, y)?;
    let lambda = lambda_constant(p);
    if lambda.abs() <= SINGULAR_TOL {
        return Err(Error::Singular { denominator: -lambda });
    }
    let grid = *y.grid();
    let m = Moments::compute(&grid, y.values(), p.eta);
    Ok(assemble(p, lambda, &grid, &m))
}

pub(crate) fn assemble(p: &Params<f64>, lambda: f64, grid: &Grid, m: &Moments) -> SolutionCurve {
    let Params {
        t_end,
        eta,
        alpha,
        beta,
    } = *p;
    let values = grid
        .nodes()
        .zip(&m.volterra)
        .map(|(t, v)| {
            let c_near = beta * (2.0 * t_end - alpha * eta * eta) - 2.0 * beta * (1.0 - alpha * eta) * t;
            let c_near_sq = alpha * beta * eta - alpha * (beta - 1.0) * t;
            let c_full = 2.0 * (beta - 1.0) * t - 2.0 * beta * eta;
            -(c_near * m.near + c_near_sq * m.near_sq + c_full * m.full) / lambda - v
        })
        .collect();
    SolutionCurve::new(*grid, values).expect("finite inputs give finite outputs")
}

/// Initial data `(u(0), u'(0))` and the curve, from direct integration.
pub fn solve_linear_oracle(p: &Params<f64>, y: &SolutionCurve) -> Result<SolutionCurve> {
    check_curve_grid(p, y)?;
    let grid = *y.grid();
    let Params {
        t_end,
        eta,
        alpha,
        beta,
    } = *p;
    let m = Moments::compute(&grid, y.values(), eta);
    let v = &m.volterra;
    let v_eta = grid.interpolate(v, eta);
    let v_end = v[grid.len() - 1];
    let v_int = grid.integrate_to(v, eta);

    // u0 (1 - beta) - s0 beta eta          = -beta V(eta)
    // u0 (1 - alpha eta) + s0 (T - alpha eta^2 / 2) = V(T) - alpha int_0^eta V
    let (a11, a12, b1) = (1.0 - beta, -beta * eta, -beta * v_eta);
    let (a21, a22, b2) = (1.0 - alpha * eta, t_end - 0.5 * alpha * eta * eta, v_end - alpha * v_int);
    let det = a11 * a22 - a12 * a21;
    if det.abs() <= SINGULAR_TOL {
        return Err(Error::Singular { denominator: det });
    }
    let u0 = (b1 * a22 - a12 * b2) / det;
    let s0 = (a11 * b2 - b1 * a21) / det;
    let values = grid.nodes().zip(v).map(|(t, vt)| u0 + s0 * t - vt).collect();
    SolutionCurve::new(grid, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `max |(u_{i+1} - 2u_i + u_{i-1}) / h^2 + y_i|` over interior nodes.
    pub ode_residual_max: f64,
    /// `|u(0) - beta u(eta)|`
    pub bc0_residual: f64,
    /// `|u(T) - alpha int_0^eta u|`
    pub bc_t_residual: f64,
}

impl ResidualReport {
    pub fn bc_max(&self) -> f64 {
        self.bc0_residual.max(self.bc_t_residual)
    }

    pub fn within(&self, ode_tol: f64, bc_tol: f64) -> bool {
        self.ode_residual_max <= ode_tol && self.bc_max() <= bc_tol
    }
}

pub fn residuals(p: &Params<f64>, u: &SolutionCurve, y: &SolutionCurve) -> Result<ResidualReport> {
    u.check_same_grid(y)?;
    let grid = u.grid();
    let h2 = grid.step() * grid.step();
    let (uv, yv) = (u.values(), y.values());
    let ode = (1..uv.len() - 1)
        .map(|i| ((uv[i + 1] - 2.0 * uv[i] + uv[i - 1]) / h2 + yv[i]).abs())
        .fold(0.0, f64::max);
    let bc0 = (uv[0] - p.beta * u.at(p.eta)).abs();
    let bc_t = (uv[uv.len() - 1] - p.alpha * u.integral_to(p.eta)).abs();
    Ok(ResidualReport {
        ode_residual_max: ode,
        bc0_residual: bc0,
        bc_t_residual: bc_t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonnegativityCheck {
    pub ok: bool,
    pub worst_node: usize,
    pub worst_value: f64,
}

/// `min u >= -1e-10`, with the node attaining the minimum.
pub fn check_nonnegativity(u: &SolutionCurve) -> NonnegativityCheck {
    let (worst_node, worst_value) = u
        .values()
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    NonnegativityCheck {
        ok: worst_value >= -NONNEGATIVITY_TOL,
        worst_node,
        worst_value,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaBoundCheck {
    pub ok: bool,
    /// `min_{[eta,T]} u - gamma ||u||`
    pub margin: f64,
    pub tail_min: f64,
    pub norm: f64,
}

/// Tail lower bound `min_{t in [eta, T]} u(t) >= gamma ||u||` on grid nodes.
pub fn check_gamma_bound(u: &SolutionCurve, gamma: f64, eta: f64) -> GammaBoundCheck {
    let tail_min = u.min_from(eta);
    let norm = u.norm();
    let margin = tail_min - gamma * norm;
    GammaBoundCheck {
        ok: margin >= -GAMMA_BOUND_TOL,
        margin,
        tail_min,
        norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::Rational;

    fn ex1() -> Params<f64> {
        Params::new(1.0, 1.0 / 3.0, 3.0, 0.5)
    }

    fn ex2() -> Params<f64> {
        Params::new(1.0, 0.5, 1.0, 1.0)
    }

    #[test]
    fn denominator_sign_identity() {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        for p in [
            Params::new(q(1, 1), q(1, 3), q(3, 1), q(1, 2)),
            Params::new(q(1, 1), q(1, 2), q(1, 1), q(1, 1)),
            Params::new(q(5, 2), q(7, 10), q(1, 3), q(2, 9)),
        ] {
            let two = Rational::from_int(2);
            let direct = (p.alpha.clone() * &p.eta * &p.eta - &two * &p.t_end)
                - p.beta.clone()
                    * (&two * &p.eta - p.alpha.clone() * &p.eta * &p.eta - &two * &p.t_end);
            assert_eq!(green_denominator(&p), direct);
        }
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let grid = Grid::new(1.0, 65).unwrap();
        let y = SolutionCurve::zeros(grid);
        assert_eq!(solve_linear(&ex1(), &y).unwrap().norm(), 0.0);
        assert_eq!(solve_linear_oracle(&ex1(), &y).unwrap().norm(), 0.0);
        let r = residuals(&ex1(), &y, &y).unwrap();
        assert_eq!((r.ode_residual_max, r.bc0_residual, r.bc_t_residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn singular_beta_is_rejected() {
        // beta at the bound makes Lambda vanish.
        let mut p = ex2();
        p.beta = p.beta_bound();
        let grid = Grid::new(1.0, 65).unwrap();
        let y = SolutionCurve::constant(grid, 1.0).unwrap();
        assert!(matches!(solve_linear(&p, &y), Err(Error::Singular { .. })));
        assert!(matches!(solve_linear_oracle(&p, &y), Err(Error::Singular { .. })));
    }

    #[test]
    fn grid_must_match_t() {
        let grid = Grid::new(2.0, 65).unwrap();
        let y = SolutionCurve::zeros(grid);
        assert!(solve_linear(&ex1(), &y).is_err());
    }

    #[test]
    fn perturbed_node_raises_ode_residual_by_two_over_h2() {
        let grid = Grid::new(1.0, 129).unwrap();
        let y = SolutionCurve::constant(grid, 1.0).unwrap();
        let u = solve_linear(&ex2(), &y).unwrap();
        let base = residuals(&ex2(), &u, &y).unwrap().ode_residual_max;
        let mut bumped = u.clone().into_values();
        bumped[40] += 1.0;
        let bumped = SolutionCurve::new(grid, bumped).unwrap();
        let r = residuals(&ex2(), &bumped, &y).unwrap().ode_residual_max;
        let h = grid.step();
        assert!(((r - base) - 2.0 / (h * h)).abs() < 1e-6 * 2.0 / (h * h));
    }

    #[test]
    fn nonnegativity_reports_worst_node() {
        let grid = Grid::new(1.0, 5).unwrap();
        let u = SolutionCurve::new(grid, vec![0.0, 2.0, -1.0, 3.0, 0.5]).unwrap();
        let c = check_nonnegativity(&u);
        assert!(!c.ok);
        assert_eq!((c.worst_node, c.worst_value), (2, -1.0));
        assert!(check_nonnegativity(&SolutionCurve::zeros(grid)).ok);
        assert!(check_nonnegativity(&solve_linear(&ex1(), &SolutionCurve::constant(grid, 1.0).unwrap()).unwrap()).ok);
    }

    #[test]
    fn gamma_bound_on_constants_and_counterexample() {
        let grid = Grid::new(1.0, 9).unwrap();
        let k = 3.0;
        let c = check_gamma_bound(&SolutionCurve::constant(grid, k).unwrap(), 0.25, 0.5);
        assert!(c.ok);
        assert!((c.margin - 0.75 * k).abs() < 1e-15);
        // Peak before eta, nearly zero after.
        let u = SolutionCurve::new(grid, vec![1.0, 5.0, 3.0, 1.0, 0.01, 0.01, 0.01, 0.01, 0.01]).unwrap();
        assert!(!check_gamma_bound(&u, 0.25, 0.5).ok);
    }

    #[test]
    fn second_example_unit_forcing_satisfies_gamma_bound() {
        let grid = Grid::new(1.0, 257).unwrap();
        let u = solve_linear(&ex2(), &SolutionCurve::constant(grid, 1.0).unwrap()).unwrap();
        assert!(check_gamma_bound(&u, 0.25, 0.5).ok);
    }
}
