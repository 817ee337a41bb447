//! Uniform grids, composite Simpson quadrature and local cubic interpolation.
//!
//! All integrals in the crate go through this module so that the closed-form
//! solver, its oracle and the residual checks agree on one rule.

use crate::error::{Error, Result};

/// Uniform grid `t_i = i * h` on `[0, t_end]` with an odd number of nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    t_end: f64,
    n: usize,
}

impl Grid {
    pub fn new(t_end: f64, n: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::Grid(format!("right endpoint {t_end} must be positive")));
        }
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "node count {n} must be odd and at least 5"
            )));
        }
        Ok(Grid { t_end, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn step(&self) -> f64 {
        self.t_end / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.t_end
        } else {
            i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }

    /// Index `k` of the cell `[t_k, t_{k+1}]` containing `x` (clamped).
    pub fn cell_of(&self, x: f64) -> usize {
        let k = (x / self.step()).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n - 2)
        }
    }

    /// Cumulative integral `C[i] ~ int_0^{t_i} y`.
    ///
    /// Even nodes use composite Simpson. Odd nodes add the half-panel
    /// `[t_k, t_{k+1}]` with a four-point rule exact on cubics: centred
    /// `h (-y_{k-1} + 13 y_k + 13 y_{k+1} - y_{k+2}) / 24`, or one-sided
    /// `h (9 y_0 + 19 y_1 - 5 y_2 + y_3) / 24` on the first panel.
    pub fn cumulative(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.n);
        let h = self.step();
        let mut out = vec![0.0; self.n];
        let mut k = 0;
        while k + 2 < self.n {
            let half = if k == 0 {
                9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]
            } else {
                -y[k - 1] + 13.0 * y[k] + 13.0 * y[k + 1] - y[k + 2]
            };
            out[k + 1] = out[k] + h * half / 24.0;
            out[k + 2] = out[k] + h * (y[k] + 4.0 * y[k + 1] + y[k + 2]) / 3.0;
            k += 2;
        }
        out
    }

    /// Composite Simpson over the whole grid.
    pub fn integral(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.n);
        let h = self.step();
        let mut acc = y[0] + y[self.n - 1];
        for (i, v) in y.iter().enumerate().take(self.n - 1).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h / 3.0
    }

    /// `int_0^x y` for an arbitrary `x` in `[0, t_end]`, given the
    /// cumulative array of `y`. The partial cell is integrated exactly
    /// against the local cubic interpolant.
    pub fn integral_to(&self, y: &[f64], cumulative: &[f64], x: f64) -> f64 {
        let k = self.cell_of(x);
        let left = self.node(k);
        let width = x - left;
        if width == 0.0 {
            return cumulative[k];
        }
        // Two-point Gauss-Legendre is exact for the cubic interpolant.
        let mid = left + 0.5 * width;
        let off = 0.5 * width / 3f64.sqrt();
        cumulative[k] + 0.5 * width * (self.interpolate(y, mid - off) + self.interpolate(y, mid + off))
    }

    /// Convenience wrapper computing the cumulative array internally.
    pub fn integrate_to(&self, y: &[f64], x: f64) -> f64 {
        let cumulative = self.cumulative(y);
        self.integral_to(y, &cumulative, x)
    }

    /// Four-point Lagrange interpolation around the cell containing `x`.
    pub fn interpolate(&self, y: &[f64], x: f64) -> f64 {
        let k = self.cell_of(x);
        let start = k.saturating_sub(1).min(self.n - 4);
        let h = self.step();
        let s = (x - self.node(start)) / h;
        let mut acc = 0.0;
        for j in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != j {
                    w *= (s - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += w * y[start + j];
        }
        acc
    }
}
