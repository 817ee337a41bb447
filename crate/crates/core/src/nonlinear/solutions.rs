//! Multi-start search for positive solutions and their classification.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use super::operator::{cone_membership, forcing, psi, ConeCheck};
use super::picard::{
    picard_iterate, stabilized_fixed_point, verify_solution, FixedPointResult, IterationOptions, Status,
};
use super::shooting::{newton_shoot, NewtonOptions};
use crate::certifier::{logspace, ThresholdTriple};
use crate::constants::Constants;
use crate::curve::SolutionCurve;
use crate::error::Result;
use crate::problem::Problem;
use crate::quadrature::Grid;
use crate::tolerances::{ode_residual_tol, Tolerances, DEFAULT_GRID_N, NONNEGATIVITY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Small,
    LargeMin,
    Middle,
    Unclassified,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Small => "small",
            Label::LargeMin => "large-min",
            Label::Middle => "middle",
            Label::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolutionClass {
    pub norm: f64,
    /// `psi(u)`, the minimum over `[0, T]`.
    pub min_full: f64,
    /// Minimum over `[eta, T]`.
    pub min_tail: f64,
    pub label: Label,
}

/// `small`: `||u|| < a`; `large-min`: `psi(u) > b`; `middle`: `a < ||u||`
/// and `psi(u) < b`. Anything on a boundary is `unclassified`.
pub fn classify_solution(u: &SolutionCurve, tt: &ThresholdTriple, eta: f64) -> SolutionClass {
    let (a, b, _) = tt.values();
    let norm = u.norm();
    let min_full = psi(u);
    let label = if norm < a {
        Label::Small
    } else if min_full > b {
        Label::LargeMin
    } else if a < norm && min_full < b {
        Label::Middle
    } else {
        Label::Unclassified
    };
    SolutionClass {
        norm,
        min_full,
        min_tail: u.min_from(eta),
        label,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Picard,
    Shooting,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveConfig {
    /// Odd number of grid nodes.
    pub grid_n: usize,
    pub tolerances: Tolerances,
    pub max_iter: usize,
    /// Shooting starts per axis; the grid has `starts_per_axis^2` points.
    pub starts_per_axis: usize,
    /// Smallest constant Picard start is `epsilon * a`.
    pub epsilon: f64,
    pub newton: NewtonOptions,
    /// Re-derive every solution by the route that did not find it.
    pub cross_validate: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            grid_n: DEFAULT_GRID_N,
            tolerances: Tolerances::default(),
            max_iter: 500,
            starts_per_axis: 16,
            epsilon: 0.01,
            newton: NewtonOptions::default(),
            cross_validate: true,
        }
    }
}

impl SolveConfig {
    fn iteration(&self) -> IterationOptions {
        IterationOptions {
            tol: self.tolerances.picard_tol,
            max_iter: self.max_iter,
            residual_tol: self.tolerances.residual_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoundSolution {
    pub result: FixedPointResult,
    /// Present when thresholds were supplied.
    pub class: Option<SolutionClass>,
    pub sources: Vec<Source>,
    /// Sup distance between the Picard and shooting curves, when both exist.
    pub route_distance: Option<f64>,
    pub cone: ConeCheck,
    /// `(u(0), u'(0))` of the shooting curve, when there is one.
    pub initial_data: Option<(f64, f64)>,
}

impl FoundSolution {
    pub fn curve(&self) -> &SolutionCurve {
        &self.result.curve
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardStart {
    pub start: f64,
    pub status: Status,
    pub iterations: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSummary {
    pub picard: Vec<PicardStart>,
    pub shooting_starts: usize,
    pub shooting_converged: usize,
    /// Converged shooting curves that failed the residual or cone checks.
    pub shooting_rejected: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub solutions: Vec<FoundSolution>,
    pub summary: SearchSummary,
}

/// Scales used when no thresholds are given.
const DEFAULT_SCALE: (f64, f64) = (1.0, 100.0);

fn picard_starts(p: &Problem, tt: Option<&ThresholdTriple>, epsilon: f64) -> Vec<f64> {
    match tt {
        Some(tt) => {
            let (a, b, c) = tt.values();
            let mut starts = vec![epsilon * a, a, b];
            if let Ok(k) = Constants::compute(p) {
                starts.push(b / k.gamma.value());
            }
            starts.push(c);
            starts
        }
        None => vec![1e-2, 1e-1, 1.0, 10.0, 100.0],
    }
}

/// `u0` log-spaced over `[1e-4 a, 2c]`; `s0` on a signed log grid with
/// magnitudes in `[1e-4 a / T, 2c / T]`, half negative and half positive.
pub fn shooting_starts(t_end: f64, a: f64, c: f64, per_axis: usize) -> Vec<(f64, f64)> {
    let u0s = logspace(1e-4 * a, 2.0 * c, per_axis);
    let neg = per_axis / 2;
    let pos = per_axis - neg;
    let mut s0s: Vec<f64> = logspace(1e-4 * a / t_end, 2.0 * c / t_end, neg)
        .into_iter()
        .rev()
        .map(|s| -s)
        .collect();
    s0s.extend(logspace(1e-4 * a / t_end, 2.0 * c / t_end, pos));
    u0s.iter().flat_map(|&u| s0s.iter().map(move |&s| (u, s))).collect()
}

/// Initial slope of the trajectory through `u`: integrating `u'' = -f`
/// twice gives `u(T) = u(0) + s0 T - int_0^T (T - s) f(s, u(s)) ds`.
pub fn initial_slope(p: &Problem, u: &SolutionCurve) -> Result<f64> {
    let (y, _) = forcing(p, u)?;
    let t_end = u.t_end();
    let weighted: Vec<f64> = u.grid().nodes().zip(y.values()).map(|(t, f)| (t_end - t) * f).collect();
    let moment = u.grid().integral(&weighted);
    let v = u.values();
    Ok((v[v.len() - 1] - v[0] + moment) / t_end)
}

struct Candidate {
    result: FixedPointResult,
    source: Source,
    initial_data: Option<(f64, f64)>,
}

/// Residuals relative to their bounds; lower is better.
fn residual_score(r: &FixedPointResult, bc_tol: f64) -> f64 {
    (r.residuals.ode_residual_max / ode_residual_tol(r.curve.step(), &[])).max(r.residuals.bc_max() / bc_tol)
}

fn shooting_candidate(
    p: &Problem,
    grid: &Grid,
    start: (f64, f64),
    cfg: &SolveConfig,
) -> Result<Option<(Candidate, bool)>> {
    let s = newton_shoot(p, grid, start, &cfg.newton)?;
    let curve = match (s.converged, s.curve) {
        (true, Some(c)) => c,
        _ => return Ok(None),
    };
    let (residuals, ok) = verify_solution(p, &curve, cfg.tolerances.residual_tol)?;
    let member = curve.min() >= -NONNEGATIVITY_TOL && cone_membership(&curve).member;
    let result = FixedPointResult {
        curve,
        converged: ok,
        status: if ok { Status::Converged } else { Status::ResidualCheckFailed },
        iterations: s.iterations,
        final_update_norm: s.last_step,
        residuals,
        clamp_events: s.clamped,
    };
    Ok(Some((
        Candidate {
            result,
            source: Source::Shooting,
            initial_data: Some((s.u0, s.s0)),
        },
        ok && member,
    )))
}

struct Group {
    best: Candidate,
    picard: Option<SolutionCurve>,
    shooting: Option<(SolutionCurve, (f64, f64))>,
}

impl Group {
    fn new(c: Candidate) -> Group {
        let mut g = Group {
            picard: None,
            shooting: None,
            best: Candidate {
                result: c.result.clone(),
                source: c.source,
                initial_data: c.initial_data,
            },
        };
        g.record(&c);
        g
    }

    fn record(&mut self, c: &Candidate) {
        match c.source {
            Source::Picard => {
                self.picard.get_or_insert_with(|| c.result.curve.clone());
            }
            Source::Shooting => {
                if let Some(x) = c.initial_data {
                    self.shooting.get_or_insert_with(|| (c.result.curve.clone(), x));
                }
            }
        }
    }

    fn absorb(&mut self, c: Candidate, bc_tol: f64) {
        self.record(&c);
        if residual_score(&c.result, bc_tol) < residual_score(&self.best.result, bc_tol) {
            self.best = c;
        }
    }

    fn sources(&self) -> Vec<Source> {
        let mut s = Vec::new();
        if self.picard.is_some() {
            s.push(Source::Picard);
        }
        if self.shooting.is_some() {
            s.push(Source::Shooting);
        }
        s
    }
}

fn by_norm_then_psi(x: &Candidate, y: &Candidate) -> Ordering {
    let key = |c: &Candidate| (c.result.curve.norm(), psi(&c.result.curve));
    let (kx, ky) = (key(x), key(y));
    kx.0.total_cmp(&ky.0).then(kx.1.total_cmp(&ky.1))
}

/// Sorts by `(||u||, psi(u))` and merges curves closer than
/// `dedup_tol * max(1, ||u||)`.
fn dedup(mut candidates: Vec<Candidate>, cfg: &SolveConfig) -> Result<Vec<Group>> {
    candidates.sort_by(by_norm_then_psi);
    let mut groups: Vec<Group> = Vec::new();
    for c in candidates {
        let tol = cfg.tolerances.dedup_tol * c.result.curve.norm().max(1.0);
        let mut hit = None;
        for (i, g) in groups.iter().enumerate() {
            if g.best.result.curve.sup_distance(&c.result.curve)? < tol {
                hit = Some(i);
                break;
            }
        }
        match hit {
            Some(i) => groups[i].absorb(c, cfg.tolerances.residual_tol),
            None => groups.push(Group::new(c)),
        }
    }
    Ok(groups)
}

/// Runs the other route from a solution found by only one of them.
fn cross_validate(p: &Problem, grid: &Grid, g: &mut Group, cfg: &SolveConfig) -> Result<()> {
    let bc_tol = cfg.tolerances.residual_tol;
    let tol = cfg.tolerances.dedup_tol * g.best.result.curve.norm().max(1.0);
    if g.shooting.is_none() {
        let u = g.best.result.curve.clone();
        let start = (u.values()[0], initial_slope(p, &u)?);
        if let Some((c, ok)) = shooting_candidate(p, grid, start, cfg)? {
            if ok && c.result.curve.sup_distance(&u)? < tol {
                g.absorb(c, bc_tol);
            }
        }
    }
    if g.picard.is_none() {
        let seed = g.best.result.curve.map(|_, v| v.max(0.0))?;
        let r = stabilized_fixed_point(p, &seed, &cfg.iteration())?;
        if r.converged && cone_membership(&r.curve).member && r.curve.sup_distance(&seed)? < tol {
            g.absorb(
                Candidate {
                    result: r,
                    source: Source::Picard,
                    initial_data: None,
                },
                bc_tol,
            );
        }
    }
    Ok(())
}

/// Picard iteration from constant starts plus damped Newton shooting from a
/// 2-D grid of initial data; results are verified, deduplicated and, with
/// thresholds, classified. An empty set is a valid outcome.
pub fn find_solutions(p: &Problem, tt: Option<&ThresholdTriple>, cfg: &SolveConfig) -> Result<SolutionSet> {
    let grid = Grid::new(p.t_end(), cfg.grid_n)?;
    let iteration = cfg.iteration();

    let starts = picard_starts(p, tt, cfg.epsilon);
    let picard_runs: Vec<(f64, FixedPointResult)> = starts
        .par_iter()
        .map(|&s| {
            let u0 = SolutionCurve::constant(grid, s)?;
            Ok((s, picard_iterate(p, &u0, &iteration)?))
        })
        .collect::<Result<_>>()?;

    let (a, c) = tt.map(|t| (t.values().0, t.values().2)).unwrap_or(DEFAULT_SCALE);
    let shoot = shooting_starts(p.t_end(), a, c, cfg.starts_per_axis);
    let shot: Vec<Option<(Candidate, bool)>> = shoot
        .par_iter()
        .map(|&s| shooting_candidate(p, &grid, s, cfg))
        .collect::<Result<_>>()?;

    let summary = SearchSummary {
        picard: picard_runs
            .iter()
            .map(|(s, r)| PicardStart {
                start: *s,
                status: r.status,
                iterations: r.iterations,
                norm: r.curve.norm(),
            })
            .collect(),
        shooting_starts: shoot.len(),
        shooting_converged: shot.iter().flatten().count(),
        shooting_rejected: shot.iter().flatten().filter(|(_, ok)| !ok).count(),
    };

    let mut candidates: Vec<Candidate> = picard_runs
        .into_iter()
        .filter(|(_, r)| r.converged && cone_membership(&r.curve).member)
        .map(|(_, result)| Candidate {
            result,
            source: Source::Picard,
            initial_data: None,
        })
        .collect();
    candidates.extend(shot.into_iter().flatten().filter(|(_, ok)| *ok).map(|(c, _)| c));

    let mut groups = dedup(candidates, cfg)?;
    if cfg.cross_validate {
        groups
            .par_iter_mut()
            .try_for_each(|g| cross_validate(p, &grid, g, cfg))?;
    }

    let solutions = groups
        .into_iter()
        .map(|g| {
            let sources = g.sources();
            let route_distance = match (&g.picard, &g.shooting) {
                (Some(x), Some((y, _))) => Some(x.sup_distance(y)?),
                _ => None,
            };
            let initial_data = g.shooting.as_ref().map(|(_, x)| *x);
            let result = g.best.result;
            Ok(FoundSolution {
                class: tt.map(|t| classify_solution(&result.curve, t, p.eta())),
                cone: cone_membership(&result.curve),
                result,
                sources,
                route_distance,
                initial_data,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SolutionSet { solutions, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(1.0, 33).unwrap()
    }

    #[test]
    fn labels_by_predicate() {
        let tt = ThresholdTriple::from_f64(0.1, 2.0, 100.0).unwrap();
        let small = SolutionCurve::constant(grid(), 0.05).unwrap();
        assert_eq!(classify_solution(&small, &tt, 0.5).label, Label::Small);
        let large = SolutionCurve::constant(grid(), 4.0).unwrap();
        assert_eq!(classify_solution(&large, &tt, 0.5).label, Label::LargeMin);
        // ||u|| = 3a = 0.3, psi(u) = b/2 would exceed the norm, so use a tent
        let tt = ThresholdTriple::from_f64(0.1, 2.0, 100.0).unwrap();
        let mid = SolutionCurve::from_fn(grid(), |t| 0.3 - 0.2 * (t - 0.5).abs()).unwrap();
        let class = classify_solution(&mid, &tt, 0.5);
        assert_eq!(class.label, Label::Middle);
        assert!((class.norm - 0.3).abs() < 1e-15 && (class.min_full - 0.2).abs() < 1e-15);
        let edge = SolutionCurve::constant(grid(), 0.1).unwrap();
        assert_eq!(classify_solution(&edge, &tt, 0.5).label, Label::Unclassified);
    }

    #[test]
    fn start_grid_shape() {
        let s = shooting_starts(2.0, 1.0, 100.0, 16);
        assert_eq!(s.len(), 256);
        assert_eq!(s.iter().filter(|x| x.1 < 0.0).count(), 128);
        let u_lo = s.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
        let s_hi = s.iter().map(|x| x.1).fold(0.0, f64::max);
        assert!((u_lo - 1e-4).abs() < 1e-16 && (s_hi - 100.0).abs() < 1e-9);
    }
}
