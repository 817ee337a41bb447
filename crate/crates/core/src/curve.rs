use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::quadrature::Grid;

/// A function on `[0, T]` sampled at the nodes of a uniform [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCurve {
    grid: Grid,
    values: Vec<f64>,
}

impl SolutionCurve {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!("non-finite value at node {i}")));
        }
        Ok(SolutionCurve { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        SolutionCurve::new(grid, grid.nodes().map(f).collect())
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        SolutionCurve::new(grid, vec![value; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        SolutionCurve {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn t_end(&self) -> f64 {
        self.grid.t_end()
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    /// Sup norm `max |u(t_i)|`.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Minimum over the nodes with `t >= from`.
    pub fn min_from(&self, from: f64) -> f64 {
        let tol = 1e-12 * self.t_end();
        self.grid
            .nodes()
            .zip(&self.values)
            .filter(|(t, _)| *t >= from - tol)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    }

    /// Cubic interpolation at an arbitrary point.
    pub fn at(&self, t: f64) -> f64 {
        self.grid.interpolate(&self.values, t)
    }

    /// `int_0^x u`.
    pub fn integral_to(&self, x: f64) -> f64 {
        self.grid.integrate_to(&self.values, x)
    }

    pub fn sup_distance(&self, other: &SolutionCurve) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn check_same_grid(&self, other: &SolutionCurve) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape(format!(
                "grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &SolutionCurve) -> Result<SolutionCurve> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        SolutionCurve::new(self.grid, values)
    }

    pub fn scaled(&self, factor: f64) -> Result<SolutionCurve> {
        SolutionCurve::new(self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<SolutionCurve> {
        let values = self
            .grid
            .nodes()
            .zip(&self.values)
            .map(|(t, v)| f(t, *v))
            .collect();
        SolutionCurve::new(self.grid, values)
    }

    /// Writes `t,u` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,u")?;
        for (t, u) in self.grid.nodes().zip(&self.values) {
            writeln!(out, "{},{}", format_sig17(t), format_sig17(*u))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Decimal rendering with 17 significant digits; round-trips every `f64`.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_full_precision() {
        let grid = Grid::new(1.0, 5).unwrap();
        let u = SolutionCurve::from_fn(grid, |t| (t * 7.0).sin() / 3.0).unwrap();
        let csv = u.to_csv_string();
        assert!(csv.starts_with("t,u\n"));
        assert!(csv.ends_with('\n'));
        let parsed: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(parsed, u.values());
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let grid = Grid::new(1.0, 5).unwrap();
        assert!(SolutionCurve::new(grid, vec![0.0; 4]).is_err());
        assert!(SolutionCurve::new(grid, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn norms_and_tail_minimum() {
        let grid = Grid::new(1.0, 5).unwrap();
        let u = SolutionCurve::new(grid, vec![3.0, -5.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(u.norm(), 5.0);
        assert_eq!(u.min(), -5.0);
        assert_eq!(u.min_from(0.5), 1.0);
        assert_eq!(u.min_from(0.6), 2.0);
    }
}
