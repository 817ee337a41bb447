//! Sampled verification of the triple-solution growth conditions
//!
//! ```text
//! (D1) f(t,u) <  m a     on [0,T]   x [0,a]
//! (D2) f(t,u) >= b/delta on [eta,T] x [b, b/gamma]
//! (D3) f(t,u) <= m c     on [0,T]   x [0,c]
//! ```
//!
//! plus the ordering `0 < a < b < b/gamma <= c`. Box extrema come from a
//! dense grid with one local refinement pass around the worst sample, or
//! from the `u`-endpoint alone when `f` is declared nondecreasing in `u`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::number::{less_or_equal, strictly_less, Number, Rational, Scalar};
use crate::problem::Problem;

/// `0 < a < b < b/gamma <= c`; `d = b/gamma` is derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdTriple {
    pub a: Number,
    pub b: Number,
    pub c: Number,
}

impl ThresholdTriple {
    pub fn new(a: Number, b: Number, c: Number) -> Result<Self> {
        for (name, v) in [("a", &a), ("b", &b), ("c", &c)] {
            if !(v.is_finite() && v.value() > 0.0) {
                return Err(Error::Thresholds(format!("{name} = {v} must be positive")));
            }
        }
        Ok(ThresholdTriple { a, b, c })
    }

    pub fn from_f64(a: f64, b: f64, c: f64) -> Result<Self> {
        ThresholdTriple::new(Number::float(a), Number::float(b), Number::float(c))
    }

    /// `d = b / gamma`.
    pub fn d(&self, gamma: &Number) -> Number {
        &self.b / gamma
    }

    pub fn values(&self) -> (f64, f64, f64) {
        (self.a.value(), self.b.value(), self.c.value())
    }
}

fn ordering_holds<S: Scalar>(a: &S, b: &S, c: &S, gamma: &S) -> bool {
    let zero = S::from_int(0);
    let d = b.clone() / gamma.clone();
    strictly_less(&zero, a) && strictly_less(a, b) && strictly_less(b, &d) && less_or_equal(&d, c)
}

/// `0 < a < b < b/gamma <= c`: exact when every input is, otherwise with
/// `1e-12` slack on the float comparisons.
pub fn check_ordering(tt: &ThresholdTriple, gamma: &Number) -> bool {
    match (tt.a.as_exact(), tt.b.as_exact(), tt.c.as_exact(), gamma.as_exact()) {
        (Some(a), Some(b), Some(c), Some(g)) => ordering_holds::<Rational>(a, b, c, g),
        _ => ordering_holds(&tt.a.value(), &tt.b.value(), &tt.c.value(), &gamma.value()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub t_nodes: usize,
    pub u_nodes: usize,
    /// Extra pass around the worst sample.
    pub refine: bool,
    /// Density multiplier of the refinement pass.
    pub refine_factor: usize,
    /// Half-width of the refinement window as a fraction of the box side.
    pub refine_fraction: f64,
    /// Use the `u` endpoint when `f` is declared nondecreasing in `u`.
    pub use_monotone_hint: bool,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            t_nodes: 257,
            u_nodes: 257,
            refine: true,
            refine_factor: 3,
            refine_fraction: 0.05,
            use_monotone_hint: true,
        }
    }
}

impl SamplingConfig {
    /// Nested refinement: every old node stays a node.
    pub fn doubled(&self) -> Self {
        SamplingConfig {
            t_nodes: 2 * self.t_nodes - 1,
            u_nodes: 2 * self.u_nodes - 1,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    D1,
    D2,
    D3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extreme {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub holds: bool,
    /// Signed room in the binding inequality; positive means satisfied.
    pub margin: f64,
    /// Right-hand side: `m a`, `b/delta` or `m c`.
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_exact: Option<String>,
    /// Sampled max (D1, D3) or min (D2) of `f` over the box.
    pub extreme_f: f64,
    pub worst_point: (f64, f64),
    pub samples_used: usize,
    pub t_range: (f64, f64),
    pub u_range: (f64, f64),
    pub used_monotone_hint: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub ordering_ok: bool,
    pub d1: ConditionReport,
    pub d2: ConditionReport,
    pub d3: ConditionReport,
    pub verdict: bool,
    pub sampling: SamplingConfig,
}

struct BoxExtreme {
    value: f64,
    at: (f64, f64),
    samples: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { hi } else { lo + i as f64 * step })
}

fn better(kind: Extreme, candidate: f64, current: f64) -> bool {
    match kind {
        Extreme::Max => candidate > current,
        Extreme::Min => candidate < current,
    }
}

/// Extreme of `f` over a tensor grid; rows are evaluated in parallel and
/// reduced in row order so ties resolve identically on every run.
fn grid_extreme(
    f: &FunctionSpec,
    ts: &[f64],
    us: &[f64],
    kind: Extreme,
) -> Result<BoxExtreme> {
    let rows: Vec<Result<(f64, (f64, f64))>> = ts
        .par_iter()
        .map(|&t| {
            let mut best: Option<(f64, (f64, f64))> = None;
            for &u in us {
                let v = f.eval(t, u)?;
                if best.is_none_or(|(b, _)| better(kind, v, b)) {
                    best = Some((v, (t, u)));
                }
            }
            Ok(best.expect("at least one u sample"))
        })
        .collect();
    let mut best: Option<(f64, (f64, f64))> = None;
    for row in rows {
        let (v, at) = row?;
        if best.is_none_or(|(b, _)| better(kind, v, b)) {
            best = Some((v, at));
        }
    }
    let (value, at) = best.expect("at least one t sample");
    Ok(BoxExtreme {
        value,
        at,
        samples: ts.len() * us.len(),
    })
}

fn box_extreme(
    f: &FunctionSpec,
    t_range: (f64, f64),
    u_range: (f64, f64),
    kind: Extreme,
    cfg: &SamplingConfig,
) -> Result<(BoxExtreme, bool)> {
    let monotone = cfg.use_monotone_hint && f.monotone_in_u();
    let ts: Vec<f64> = linspace(t_range.0, t_range.1, cfg.t_nodes).collect();
    let us: Vec<f64> = if monotone {
        vec![match kind {
            Extreme::Max => u_range.1,
            Extreme::Min => u_range.0,
        }]
    } else {
        linspace(u_range.0, u_range.1, cfg.u_nodes).collect()
    };
    let mut ext = grid_extreme(f, &ts, &us, kind)?;

    if cfg.refine && cfg.refine_factor > 1 {
        let window = |lo: f64, hi: f64, centre: f64, nodes: usize| -> Vec<f64> {
            if nodes < 2 || hi <= lo {
                return vec![centre];
            }
            let half = cfg.refine_fraction * (hi - lo);
            let (wlo, whi) = ((centre - half).max(lo), (centre + half).min(hi));
            let spacing = (hi - lo) / ((nodes - 1) * cfg.refine_factor) as f64;
            let count = (((whi - wlo) / spacing).round() as usize).max(1) + 1;
            linspace(wlo, whi, count).collect()
        };
        let rts = window(t_range.0, t_range.1, ext.at.0, cfg.t_nodes);
        let rus = if monotone {
            us.clone()
        } else {
            window(u_range.0, u_range.1, ext.at.1, cfg.u_nodes)
        };
        let fine = grid_extreme(f, &rts, &rus, kind)?;
        let samples = ext.samples + fine.samples;
        if better(kind, fine.value, ext.value) {
            ext = fine;
        }
        ext.samples = samples;
    }
    Ok((ext, monotone))
}

fn wrap_eval_error(condition: Condition, e: Error) -> Error {
    match e {
        Error::Evaluation { t, u, reason } => Error::Evaluation {
            t,
            u,
            reason: format!("while checking {condition:?}: {reason}"),
        },
        other => other,
    }
}

#[allow(clippy::too_many_arguments)]
fn condition_report(
    condition: Condition,
    f: &FunctionSpec,
    t_range: (f64, f64),
    u_range: (f64, f64),
    kind: Extreme,
    bound: &Number,
    strict: bool,
    cfg: &SamplingConfig,
) -> Result<ConditionReport> {
    let (ext, monotone) =
        box_extreme(f, t_range, u_range, kind, cfg).map_err(|e| wrap_eval_error(condition, e))?;
    let margin = match kind {
        Extreme::Max => bound.value() - ext.value,
        Extreme::Min => ext.value - bound.value(),
    };
    let holds = if strict { margin > 0.0 } else { margin >= 0.0 };
    Ok(ConditionReport {
        condition,
        holds,
        margin,
        bound: bound.value(),
        bound_exact: bound.exact_string(),
        extreme_f: ext.value,
        worst_point: ext.at,
        samples_used: ext.samples,
        t_range,
        u_range,
        used_monotone_hint: monotone,
    })
}

/// `f < m a` on `[0,T] x [0,a]` (strict).
pub fn check_d1(p: &Problem, m: &Number, a: &Number, cfg: &SamplingConfig) -> Result<ConditionReport> {
    let bound = m * a;
    condition_report(
        Condition::D1,
        p.f(),
        (0.0, p.t_end()),
        (0.0, a.value()),
        Extreme::Max,
        &bound,
        true,
        cfg,
    )
}

/// `f >= b/delta` on `[eta,T] x [b, b/gamma]`.
pub fn check_d2(
    p: &Problem,
    delta: &Number,
    b: &Number,
    gamma: &Number,
    cfg: &SamplingConfig,
) -> Result<ConditionReport> {
    let bound = b / delta;
    let d = b / gamma;
    condition_report(
        Condition::D2,
        p.f(),
        (p.eta(), p.t_end()),
        (b.value(), d.value()),
        Extreme::Min,
        &bound,
        false,
        cfg,
    )
}

/// `f <= m c` on `[0,T] x [0,c]`.
pub fn check_d3(p: &Problem, m: &Number, c: &Number, cfg: &SamplingConfig) -> Result<ConditionReport> {
    let bound = m * c;
    condition_report(
        Condition::D3,
        p.f(),
        (0.0, p.t_end()),
        (0.0, c.value()),
        Extreme::Max,
        &bound,
        false,
        cfg,
    )
}

pub fn certify(
    p: &Problem,
    tt: &ThresholdTriple,
    k: &Constants,
    cfg: &SamplingConfig,
) -> Result<Certificate> {
    let ordering_ok = check_ordering(tt, &k.gamma);
    let d1 = check_d1(p, &k.m, &tt.a, cfg)?;
    let d2 = check_d2(p, &k.delta, &tt.b, &k.gamma, cfg)?;
    let d3 = check_d3(p, &k.m, &tt.c, cfg)?;
    let verdict = ordering_ok && d1.holds && d2.holds && d3.holds;
    Ok(Certificate {
        ordering_ok,
        d1,
        d2,
        d3,
        verdict,
        sampling: *cfg,
    })
}

/// Bounds and resolution of the threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub lo: f64,
    pub hi: f64,
    /// Log-spaced points per axis on the first level and per zoom.
    pub points: usize,
    /// Zoom levels after the first scan.
    pub max_levels: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            lo: 1e-4,
            hi: 1e4,
            points: 33,
            max_levels: 12,
        }
    }
}

/// One axis of the search: candidate values with memoized check margins.
struct Axis {
    values: Vec<f64>,
    margins: Vec<Option<(bool, f64)>>,
}

impl Axis {
    fn new(values: Vec<f64>) -> Self {
        let margins = vec![None; values.len()];
        Axis { values, margins }
    }

    fn evaluate(&mut self, check: &dyn Fn(f64) -> Result<ConditionReport>) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if self.margins[i].is_none() {
                let r = check(*v)?;
                // Relative, so that tiny thresholds do not win on scale alone.
                self.margins[i] = Some((r.holds, r.margin / r.bound.abs().max(f64::MIN_POSITIVE)));
            }
        }
        Ok(())
    }

    fn passing(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.margins)
            .filter(|(_, m)| matches!(m, Some((true, _))))
            .map(|(v, _)| *v)
    }

    fn any_pass(&self) -> bool {
        self.passing().next().is_some()
    }

    /// Inserts `points` log-spaced values between the neighbours of the
    /// value with the best relative margin.
    fn zoom(&mut self, points: usize) {
        let best = self
            .margins
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|(_, margin)| (i, margin)))
            .fold(None, |acc: Option<(usize, f64)>, (i, m)| match acc {
                Some((_, bm)) if bm >= m => acc,
                _ => Some((i, m)),
            });
        let Some((i, _)) = best else { return };
        let lo = self.values[i.saturating_sub(1)];
        let hi = self.values[(i + 1).min(self.values.len() - 1)];
        let mut merged: Vec<(f64, Option<(bool, f64)>)> =
            self.values.iter().copied().zip(self.margins.iter().copied()).collect();
        for v in logspace(lo, hi, points) {
            if !merged.iter().any(|(x, _)| *x == v) {
                merged.push((v, None));
            }
        }
        merged.sort_by(|x, y| x.0.total_cmp(&y.0));
        self.values = merged.iter().map(|x| x.0).collect();
        self.margins = merged.iter().map(|x| x.1).collect();
    }
}

pub(crate) fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (l + (h - l) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Coarse-to-fine scan for a certifiable `(a, b, c)`.
///
/// The three growth conditions each depend on one threshold only, so every
/// axis is checked once per candidate value. The scan order is `a`
/// ascending, `b` ascending, `c` descending; an axis with no passing value
/// is refined around its best margin before the next pass. Any triple
/// returned has been re-certified.
pub fn search_thresholds(
    p: &Problem,
    k: &Constants,
    bounds: &SearchConfig,
    sampling: &SamplingConfig,
) -> Result<Option<ThresholdTriple>> {
    if !(bounds.lo > 0.0 && bounds.hi > bounds.lo && bounds.points >= 2) {
        return Err(Error::Thresholds(format!("bad search bounds {bounds:?}")));
    }
    let m = k.m.to_float();
    let delta = k.delta.to_float();
    let gamma = k.gamma.to_float();
    let check_a = |a: f64| check_d1(p, &m, &Number::float(a), sampling);
    let check_b = |b: f64| check_d2(p, &delta, &Number::float(b), &gamma, sampling);
    let check_c = |c: f64| check_d3(p, &m, &Number::float(c), sampling);

    let grid = logspace(bounds.lo, bounds.hi, bounds.points);
    let mut axes = [Axis::new(grid.clone()), Axis::new(grid.clone()), Axis::new(grid)];

    for _level in 0..=bounds.max_levels {
        axes[0].evaluate(&check_a)?;
        axes[1].evaluate(&check_b)?;
        axes[2].evaluate(&check_c)?;

        let cs: Vec<f64> = axes[2].passing().collect();
        for a in axes[0].passing() {
            for b in axes[1].passing() {
                if b <= a {
                    continue;
                }
                for &c in cs.iter().rev() {
                    let tt = ThresholdTriple::from_f64(a, b, c)?;
                    if !check_ordering(&tt, &gamma) {
                        continue;
                    }
                    if certify(p, &tt, k, sampling)?.verdict {
                        return Ok(Some(tt));
                    }
                }
            }
        }

        let mut refined = false;
        for axis in axes.iter_mut() {
            if !axis.any_pass() {
                axis.zoom(bounds.points);
                refined = true;
            }
        }
        if !refined {
            // Every axis has passing values but no combination is ordered.
            break;
        }
    }
    Ok(None)
}
