//! Parameter sweeps over `alpha`, `beta` and `eta`.

use std::fmt::Write as _;
use std::str::FromStr;

use tpbvp_core::certifier::{certify, SamplingConfig, ThresholdTriple};
use tpbvp_core::curve::format_sig17;
use tpbvp_core::problem::DEFAULT_U_MAX;
use tpbvp_core::{validate_hypotheses, Constants, Number, Problem};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    Alpha,
    Beta,
    Eta,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Eta => "eta",
        }
    }
}

/// `name:lo:hi:steps`; `steps` evenly spaced values including both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<Number>,
}

impl FromStr for Axis {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Axis, Failure> {
        let bad = |why: &str| Failure::Config(format!("axis {s:?}: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi, steps] = parts.as_slice() else {
            return Err(bad("expected name:lo:hi:steps"));
        };
        let param = match *name {
            "alpha" => Param::Alpha,
            "beta" => Param::Beta,
            "eta" => Param::Eta,
            _ => return Err(bad("name must be alpha, beta or eta")),
        };
        let lo: Number = lo.parse().map_err(|_| bad("bad lower end"))?;
        let hi: Number = hi.parse().map_err(|_| bad("bad upper end"))?;
        let steps: i64 = steps.parse().map_err(|_| bad("bad step count"))?;
        if steps < 1 {
            return Err(bad("step count must be positive"));
        }
        let values = if steps == 1 {
            vec![lo]
        } else {
            let width = &hi - &lo;
            (0..steps)
                .map(|i| &lo + &(&width * &Number::ratio(i, steps - 1)))
                .collect()
        };
        Ok(Axis { param, values })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t_end: Number,
    pub eta: Number,
    pub alpha: Number,
    pub beta: Number,
    pub constants: Option<Constants>,
    pub lambda: Number,
    /// `true`/`false` with thresholds, otherwise `H2-ok`; `H2-fail` when
    /// the parameter hypotheses fail.
    pub verdict: String,
}

pub const SWEEP_HEADER: &str = "T,eta,alpha,beta,lambda,gamma,m,delta,verdict";

fn cartesian(axes: &[Axis]) -> Vec<Vec<(Param, Number)>> {
    let mut rows = vec![Vec::new()];
    for axis in axes {
        rows = rows
            .into_iter()
            .flat_map(|row| {
                axis.values.iter().map(move |v| {
                    let mut r = row.clone();
                    r.push((axis.param, v.clone()));
                    r
                })
            })
            .collect();
    }
    rows
}

/// Evaluates every grid point; rows failing the parameter hypotheses are
/// flagged rather than aborting the sweep.
pub fn sweep(
    base: &Problem,
    axes: &[Axis],
    thresholds: Option<&ThresholdTriple>,
    sampling: &SamplingConfig,
) -> Result<Vec<SweepRow>, Failure> {
    let mut seen = Vec::new();
    for a in axes {
        if seen.contains(&a.param) {
            return Err(Failure::Config(format!("axis {} given twice", a.param.name())));
        }
        seen.push(a.param);
    }
    let u_max = thresholds.map_or(DEFAULT_U_MAX, |t| t.values().2.max(DEFAULT_U_MAX));
    let mut out = Vec::new();
    for assignment in cartesian(axes) {
        let raw = base.raw_params();
        let (mut eta, mut alpha, mut beta) = (raw.eta.clone(), raw.alpha.clone(), raw.beta.clone());
        for (param, v) in assignment {
            match param {
                Param::Alpha => alpha = v,
                Param::Beta => beta = v,
                Param::Eta => eta = v,
            }
        }
        let p = Problem::new(raw.t_end.clone(), eta, alpha, beta, base.f().clone())
            .map_err(|e| Failure::Config(e.to_string()))?;
        let hyp = validate_hypotheses(&p, u_max);
        let (constants, verdict) = if !hyp.h2_ok() {
            (None, "H2-fail".to_string())
        } else {
            let k = Constants::compute(&p).map_err(Failure::numerical)?;
            let verdict = match thresholds {
                Some(tt) => certify(&p, tt, &k, sampling).map_err(Failure::numerical)?.verdict.to_string(),
                None => "H2-ok".to_string(),
            };
            (Some(k), verdict)
        };
        let raw = p.raw_params();
        out.push(SweepRow {
            t_end: raw.t_end.clone(),
            eta: raw.eta.clone(),
            alpha: raw.alpha.clone(),
            beta: raw.beta.clone(),
            lambda: p.lambda(),
            constants,
            verdict,
        });
    }
    Ok(out)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    let num = |n: &Number| format_sig17(n.value());
    for r in rows {
        let (g, m, d) = match &r.constants {
            Some(k) => (num(&k.gamma), num(&k.m), num(&k.delta)),
            None => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{g},{m},{d},{}",
            num(&r.t_end),
            num(&r.eta),
            num(&r.alpha),
            num(&r.beta),
            num(&r.lambda),
            r.verdict
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a: Axis = "beta:1/10:9/10:9".parse().unwrap();
        assert_eq!(a.param, Param::Beta);
        assert_eq!(a.values.len(), 9);
        assert_eq!(a.values[4], Number::ratio(1, 2));
        assert_eq!(a.values[8], Number::ratio(9, 10));
        let one: Axis = "eta:0.25:0.75:1".parse().unwrap();
        assert_eq!(one.values, vec![Number::ratio(1, 4)]);
        assert!("gamma:0:1:3".parse::<Axis>().is_err());
        assert!("beta:0:1".parse::<Axis>().is_err());
        assert!("beta:0:1:0".parse::<Axis>().is_err());
    }

    #[test]
    fn cartesian_order_is_row_major() {
        let axes: Vec<Axis> = ["alpha:1:2:2", "beta:0:1:3"].iter().map(|s| s.parse().unwrap()).collect();
        let rows = cartesian(&axes);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1][1].1, Number::ratio(1, 2));
        assert_eq!(rows[3][0].1, Number::integer(2));
    }
}
