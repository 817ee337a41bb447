use serde::Serialize;

use crate::curve::SolutionCurve;
use crate::error::{Error, Result};
use crate::linear::solve_linear;
use crate::problem::Problem;
use crate::tolerances::{CONCAVITY_TOL, NONNEGATIVITY_TOL};

/// `psi(u) = min_{t in [0,T]} u(t)`.
pub fn psi(u: &SolutionCurve) -> f64 {
    u.min()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeCheck {
    pub member: bool,
    /// Node indices with `u < -1e-10`.
    pub negative_nodes: Vec<usize>,
    /// Interior node indices whose second difference exceeds `1e-8 / h^2`.
    pub convex_nodes: Vec<usize>,
}

/// Membership in the cone of nonnegative, concave-down curves.
pub fn cone_membership(u: &SolutionCurve) -> ConeCheck {
    let v = u.values();
    let h = u.step();
    let slack = CONCAVITY_TOL / (h * h);
    let negative_nodes: Vec<usize> = v
        .iter()
        .enumerate()
        .filter(|(_, x)| **x < -NONNEGATIVITY_TOL)
        .map(|(i, _)| i)
        .collect();
    let convex_nodes: Vec<usize> = (1..v.len() - 1)
        .filter(|&i| (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h) > slack)
        .collect();
    ConeCheck {
        member: negative_nodes.is_empty() && convex_nodes.is_empty(),
        negative_nodes,
        convex_nodes,
    }
}

/// Samples `y(t) = f(t, max(u(t), 0))`; returns the forcing and how many
/// nodes needed clamping.
pub fn forcing(p: &Problem, u: &SolutionCurve) -> Result<(SolutionCurve, usize)> {
    let mut clamped = 0;
    let mut y = Vec::with_capacity(u.values().len());
    for (t, &v) in u.grid().nodes().zip(u.values()) {
        if v < 0.0 {
            clamped += 1;
        }
        y.push(p.f().eval(t, v.max(0.0))?);
    }
    Ok((SolutionCurve::new(*u.grid(), y)?, clamped))
}

/// The fixed-point operator `(A u) = solve_linear(f(., u(.)))`; its fixed
/// points are exactly the solutions of the nonlinear problem.
///
/// Requires `u >= -1e-10`.
pub fn apply_operator(p: &Problem, u: &SolutionCurve) -> Result<SolutionCurve> {
    if let Some((i, v)) = u
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| **v < -NONNEGATIVITY_TOL)
    {
        return Err(Error::NegativeState {
            t: u.grid().node(i),
            u: *v,
        });
    }
    let (y, _) = forcing(p, u)?;
    solve_linear(p.params(), &y)
}

/// `A` with negative inputs clamped to zero; returns the clamp count.
pub fn apply_operator_clamped(p: &Problem, u: &SolutionCurve) -> Result<(SolutionCurve, usize)> {
    let (y, clamped) = forcing(p, u)?;
    Ok((solve_linear(p.params(), &y)?, clamped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Grid;

    #[test]
    fn psi_examples() {
        let grid = Grid::new(1.0, 9).unwrap();
        assert_eq!(psi(&SolutionCurve::constant(grid, 5.0).unwrap()), 5.0);
        assert_eq!(psi(&SolutionCurve::from_fn(grid, |t| t).unwrap()), 0.0);
    }

    #[test]
    fn cone_examples() {
        let grid = Grid::new(1.0, 33).unwrap();
        assert!(cone_membership(&SolutionCurve::constant(grid, 1.0).unwrap()).member);
        let convex = cone_membership(&SolutionCurve::from_fn(grid, |t| t * t).unwrap());
        assert!(!convex.member);
        assert_eq!(convex.convex_nodes.len(), 31);
        let neg = cone_membership(&SolutionCurve::constant(grid, -1.0).unwrap());
        assert_eq!(neg.negative_nodes.len(), 33);
    }
}
