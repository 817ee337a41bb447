//! Numerical tolerances used across the crate, in one place.

use serde::{Deserialize, Serialize};

/// Default node count of the solution grid.
pub const DEFAULT_GRID_N: usize = 2049;

/// Slack for "u >= 0" on computed curves.
pub const NONNEGATIVITY_TOL: f64 = 1e-10;

/// Slack for the tail lower bound `min_{[eta,T]} u >= gamma ||u||`.
pub const GAMMA_BOUND_TOL: f64 = 1e-10;

/// Second differences may exceed zero by at most `CONCAVITY_TOL / h^2`.
pub const CONCAVITY_TOL: f64 = 1e-8;

/// Closeness to zero at which the linear boundary system counts as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Sup norm above which an iteration is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e6;

/// `|u|` above which a shooting trajectory is declared blown up.
pub const BLOW_UP_NORM: f64 = 1e9;

/// Two routes to the same solution must agree to this sup distance.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-6;

/// Constant `C` in the ODE residual bound `C h^2 max(1, ||y||, ||y''||)`.
///
/// The second-difference residual of a curve produced by the Simpson-based
/// solver is `h^2 |y''| / 12` to leading order; on 200 random smooth
/// forcings the measured ratio residual / (h^2 ||y''||) was 0.083..0.090.
/// `y''` is estimated by second differences, which also covers kinks in
/// piecewise forcings.
pub const ODE_RESIDUAL_CONSTANT: f64 = 0.25;

/// Tolerances that callers may override from configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Fixed-point update norm at which iteration stops.
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    /// Bound on the boundary-condition residuals.
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    /// Relative sup distance under which two solutions are merged.
    #[serde(default = "default_dedup_tol")]
    pub dedup_tol: f64,
}

fn default_picard_tol() -> f64 {
    1e-10
}
fn default_residual_tol() -> f64 {
    1e-8
}
fn default_dedup_tol() -> f64 {
    1e-4
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            picard_tol: default_picard_tol(),
            residual_tol: default_residual_tol(),
            dedup_tol: default_dedup_tol(),
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("picard_tol", self.picard_tol),
            ("residual_tol", self.residual_tol),
            ("dedup_tol", self.dedup_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} = {v} must be positive"));
            }
        }
        Ok(())
    }
}

/// ODE residual bound `C h^2 max(1, ||y||, max |y_{i+1} - 2y_i + y_{i-1}| / h^2)`
/// for forcing samples `y` on a grid of step `h`.
pub fn ode_residual_tol(h: f64, y: &[f64]) -> f64 {
    let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let curvature = y
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs())
        .fold(0.0f64, f64::max)
        / (h * h);
    ODE_RESIDUAL_CONSTANT * h * h * norm.max(curvature).max(1.0)
}
