//! Nonlinearities `f(t, u)`.
//!
//! A closed set of kinds, each evaluable in `f64` and, where the formula is
//! rational, exactly. Piecewise kinds are checked for continuity when built.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{Number, Rational, Scalar};

/// Values below this are treated as an attempt to evaluate outside `u >= 0`.
pub const NEGATIVE_U_TOL: f64 = 1e-10;
/// Allowed jump at a piecewise breakpoint.
pub const CONTINUITY_TOL: f64 = 1e-9;
/// Construction-time sample density per axis.
pub const SAMPLE_NODES: usize = 128;

/// Rectangle `[0, t_end] x [0, u_max]` on which a spec is sample-checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleDomain {
    pub t_end: f64,
    pub u_max: f64,
}

/// One branch `(p0 + p1 u) / (q0 + q1 u)` valid from `start` up to the next
/// branch's start.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub start: Number,
    pub numerator: [Number; 2],
    pub denominator: [Number; 2],
}

impl Branch {
    pub fn linear(start: Number, intercept: Number, slope: Number) -> Self {
        Branch {
            start,
            numerator: [intercept, slope],
            denominator: [Number::integer(1), Number::integer(0)],
        }
    }

    pub fn fraction(start: Number, numerator: [Number; 2], denominator: [Number; 2]) -> Self {
        Branch {
            start,
            numerator,
            denominator,
        }
    }

    fn eval(&self, u: f64) -> f64 {
        (self.numerator[0].value() + self.numerator[1].value() * u)
            / (self.denominator[0].value() + self.denominator[1].value() * u)
    }

    fn eval_exact(&self, u: &Rational) -> Option<Rational> {
        let p0 = self.numerator[0].as_exact()?;
        let p1 = self.numerator[1].as_exact()?;
        let q0 = self.denominator[0].as_exact()?;
        let q1 = self.denominator[1].as_exact()?;
        let den = q0 + q1 * u;
        (!den.is_zero()).then(|| (p0 + p1 * u) / den)
    }

    fn denominator_at(&self, u: f64) -> f64 {
        self.denominator[0].value() + self.denominator[1].value() * u
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TimeFactor {
    /// `exp(-rate * t)`
    Exponential { rate: Number },
    /// `sum c_k t^k`
    Polynomial { coeffs: Vec<Number> },
}

impl TimeFactor {
    fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFactor::Exponential { rate } => (-rate.value() * t).exp(),
            TimeFactor::Polynomial { coeffs } => horner(coeffs, t),
        }
    }

    fn eval_exact(&self, t: &Rational) -> Option<Rational> {
        match self {
            TimeFactor::Exponential { rate } => {
                let rate = rate.as_exact()?;
                (rate.is_zero() || t.is_zero()).then(|| Rational::from_int(1))
            }
            TimeFactor::Polynomial { coeffs } => horner_exact(coeffs, t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    /// `k u^2 / (u^2 + 1)`
    RationalSigmoid { scale: Number },
    /// `exp(-rate t) h(u)` with `h` piecewise linear-fractional.
    ExponentialPiecewise { rate: Number, branches: Vec<Branch> },
    Constant { value: Number },
    /// `sum c_k u^k`
    Polynomial { coeffs: Vec<Number> },
    /// Linear interpolation through `(u_i, v_i)`, constant past the last knot.
    PiecewiseLinear { knots: Vec<(Number, Number)> },
    /// `g(t) h(u)` with `h` any autonomous kind.
    Product { time: TimeFactor, factor: Box<FunctionSpec> },
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::RationalSigmoid { .. } => "autonomous-rational-sigmoid",
            Kind::ExponentialPiecewise { .. } => "separable-exponential-piecewise",
            Kind::Constant { .. } => "constant",
            Kind::Polynomial { .. } => "polynomial",
            Kind::PiecewiseLinear { .. } => "piecewise-linear-table",
            Kind::Product { .. } => "product",
        }
    }

    fn is_autonomous(&self) -> bool {
        !matches!(self, Kind::ExponentialPiecewise { .. } | Kind::Product { .. })
    }
}

/// Continuity check at one breakpoint of a piecewise definition.
#[derive(Clone, Debug, PartialEq)]
pub struct BreakpointCheck {
    pub at: f64,
    pub left: f64,
    pub right: f64,
    pub gap: f64,
    /// `right - left` computed exactly when every coefficient is rational.
    pub exact_gap: Option<Rational>,
}

impl BreakpointCheck {
    pub fn is_continuous(&self) -> bool {
        match &self.exact_gap {
            Some(g) => g.to_f64().abs() <= CONTINUITY_TOL,
            None => self.gap <= CONTINUITY_TOL * self.left.abs().max(1.0),
        }
    }
}

/// A nonlinearity `f(t, u)` with an optional "nondecreasing in u" hint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionDoc", into = "FunctionDoc")]
pub struct FunctionSpec {
    kind: Kind,
    monotone_in_u: Option<bool>,
}

impl FunctionSpec {
    /// Builds a spec, validating structure and continuity.
    pub fn new(kind: Kind) -> Result<Self> {
        let spec = FunctionSpec {
            kind,
            monotone_in_u: None,
        };
        spec.validate_structure()?;
        Ok(spec)
    }

    pub fn rational_sigmoid(scale: Number) -> Result<Self> {
        FunctionSpec::new(Kind::RationalSigmoid { scale })
    }

    pub fn constant(value: Number) -> Result<Self> {
        FunctionSpec::new(Kind::Constant { value })
    }

    pub fn exponential_piecewise(rate: Number, branches: Vec<Branch>) -> Result<Self> {
        FunctionSpec::new(Kind::ExponentialPiecewise { rate, branches })
    }

    pub fn with_monotone_hint(mut self, monotone: bool) -> Self {
        self.monotone_in_u = Some(monotone);
        self
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// True only when the caller asserted `f` nondecreasing in `u`.
    pub fn monotone_in_u(&self) -> bool {
        self.monotone_in_u == Some(true)
    }

    pub fn monotone_hint(&self) -> Option<bool> {
        self.monotone_in_u
    }

    /// Evaluates `f(t, u)`. Slightly negative `u` (within `NEGATIVE_U_TOL`)
    /// is read as zero.
    pub fn eval(&self, t: f64, u: f64) -> Result<f64> {
        if t.is_nan() || u.is_nan() {
            return Err(Error::Evaluation {
                t,
                u,
                reason: "NaN argument".into(),
            });
        }
        if u < -NEGATIVE_U_TOL {
            return Err(Error::NegativeState { t, u });
        }
        let value = self.eval_unchecked(t, u.max(0.0));
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Evaluation {
                t,
                u,
                reason: format!("non-finite value {value}"),
            })
        }
    }

    fn eval_unchecked(&self, t: f64, u: f64) -> f64 {
        match &self.kind {
            Kind::RationalSigmoid { scale } => {
                let u2 = u * u;
                if u2.is_infinite() {
                    scale.value()
                } else {
                    scale.value() * u2 / (u2 + 1.0)
                }
            }
            Kind::ExponentialPiecewise { rate, branches } => {
                (-rate.value() * t).exp() * branch_for(branches, u).eval(u)
            }
            Kind::Constant { value } => value.value(),
            Kind::Polynomial { coeffs } => horner(coeffs, u),
            Kind::PiecewiseLinear { knots } => linear_table(knots, u),
            Kind::Product { time, factor } => time.eval(t) * factor.eval_unchecked(t, u),
        }
    }

    /// Exact evaluation, available when the formula and every coefficient
    /// are rational at the given point.
    pub fn eval_exact(&self, t: &Rational, u: &Rational) -> Option<Rational> {
        if u.is_negative() {
            return None;
        }
        match &self.kind {
            Kind::RationalSigmoid { scale } => {
                let u2 = u * u;
                let one = Rational::from_int(1);
                Some(scale.as_exact()? * &u2 / (u2 + one))
            }
            Kind::ExponentialPiecewise { rate, branches } => {
                let g = TimeFactor::Exponential { rate: rate.clone() }.eval_exact(t)?;
                let branch = branch_for_exact(branches, u)?;
                Some(g * branch.eval_exact(u)?)
            }
            Kind::Constant { value } => value.as_exact().cloned(),
            Kind::Polynomial { coeffs } => horner_exact(coeffs, u),
            Kind::PiecewiseLinear { knots } => linear_table_exact(knots, u),
            Kind::Product { time, factor } => Some(time.eval_exact(t)? * factor.eval_exact(t, u)?),
        }
    }

    /// Jump checks at every interior breakpoint of a piecewise definition.
    pub fn breakpoint_checks(&self) -> Vec<BreakpointCheck> {
        match &self.kind {
            Kind::ExponentialPiecewise { branches, .. } => branches
                .windows(2)
                .map(|w| {
                    let (prev, next) = (&w[0], &w[1]);
                    let at = next.start.value();
                    let left = prev.eval(at);
                    let right = next.eval(at);
                    let exact_gap = next
                        .start
                        .as_exact()
                        .and_then(|x| Some(next.eval_exact(x)? - prev.eval_exact(x)?));
                    BreakpointCheck {
                        at,
                        left,
                        right,
                        gap: (right - left).abs(),
                        exact_gap,
                    }
                })
                .collect(),
            Kind::Product { factor, .. } => factor.breakpoint_checks(),
            _ => Vec::new(),
        }
    }

    fn validate_structure(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Spec(format!("{}: {msg}", self.kind.name())));
        match &self.kind {
            Kind::RationalSigmoid { scale } => {
                if !scale.is_finite() || scale.value() < 0.0 {
                    return bad(format!("scale {scale} must be finite and nonnegative"));
                }
            }
            Kind::Constant { value } => {
                if !value.is_finite() {
                    return bad(format!("value {value} is not finite"));
                }
            }
            Kind::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return bad("needs at least one finite coefficient".into());
                }
            }
            Kind::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return bad("table is empty".into());
                }
                if knots[0].0.value() != 0.0 {
                    return bad(format!("first knot at u = {} instead of 0", knots[0].0));
                }
                if let Some(w) = knots.windows(2).find(|w| w[1].0.value() <= w[0].0.value()) {
                    return bad(format!("knots not strictly ascending at u = {}", w[1].0));
                }
            }
            Kind::ExponentialPiecewise { rate, branches } => {
                if !rate.is_finite() {
                    return bad(format!("rate {rate} is not finite"));
                }
                if branches.is_empty() {
                    return bad("no branches".into());
                }
                if branches[0].start.value() != 0.0 {
                    return bad(format!("first branch starts at u = {} instead of 0", branches[0].start));
                }
                if let Some(w) = branches
                    .windows(2)
                    .find(|w| w[1].start.value() <= w[0].start.value())
                {
                    return bad(format!("breakpoints not strictly ascending at u = {}", w[1].start));
                }
                for (i, b) in branches.iter().enumerate() {
                    let lo = b.start.value();
                    let positive_hi = match branches.get(i + 1) {
                        Some(next) => b.denominator_at(next.start.value()) > 0.0,
                        None => b.denominator[1].value() >= 0.0,
                    };
                    if !(b.denominator_at(lo) > 0.0 && positive_hi) {
                        return bad(format!("denominator of branch at u = {} is not positive", b.start));
                    }
                }
                if let Some(c) = self.breakpoint_checks().iter().find(|c| !c.is_continuous()) {
                    return bad(format!(
                        "discontinuous at u = {}: left {} vs right {}",
                        c.at, c.left, c.right
                    ));
                }
            }
            Kind::Product { time, factor } => {
                if !factor.kind.is_autonomous() {
                    return bad(format!("u-factor {} must not depend on t", factor.kind.name()));
                }
                if let TimeFactor::Polynomial { coeffs } = time {
                    if coeffs.is_empty() {
                        return bad("empty time polynomial".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Samples `f` on a `SAMPLE_NODES`^2 grid of the domain, rejecting
    /// negative values and, when the monotone hint is set, decreases in `u`.
    pub fn check_on(&self, domain: SampleDomain) -> Result<()> {
        let n = SAMPLE_NODES;
        for i in 0..n {
            let t = domain.t_end * i as f64 / (n - 1) as f64;
            let mut prev = f64::NEG_INFINITY;
            for j in 0..n {
                let u = domain.u_max * j as f64 / (n - 1) as f64;
                let v = self.eval(t, u)?;
                if v < 0.0 {
                    return Err(Error::Spec(format!("f({t}, {u}) = {v} is negative")));
                }
                if self.monotone_in_u() && v < prev - 1e-12 * prev.abs().max(1.0) {
                    return Err(Error::Spec(format!(
                        "monotone hint contradicted: f decreases in u near ({t}, {u})"
                    )));
                }
                prev = v;
            }
        }
        Ok(())
    }
}

/// Parses a JSON fragment and sample-checks it on `domain`.
pub fn parse_function_spec(doc: &serde_json::Value, domain: SampleDomain) -> Result<FunctionSpec> {
    let spec: FunctionSpec =
        serde_json::from_value(doc.clone()).map_err(|e| Error::Spec(e.to_string()))?;
    spec.check_on(domain)?;
    Ok(spec)
}

fn horner(coeffs: &[Number], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.value())
}

fn horner_exact(coeffs: &[Number], x: &Rational) -> Option<Rational> {
    coeffs.iter().rev().try_fold(Rational::from_int(0), |acc, c| {
        Some(acc * x + c.as_exact()?)
    })
}

fn branch_for(branches: &[Branch], u: f64) -> &Branch {
    let idx = branches.partition_point(|b| b.start.value() <= u);
    &branches[idx.saturating_sub(1)]
}

fn branch_for_exact<'a>(branches: &'a [Branch], u: &Rational) -> Option<&'a Branch> {
    let mut found = None;
    for b in branches {
        if b.start.as_exact()? <= u {
            found = Some(b);
        }
    }
    found.or(branches.first())
}

fn linear_table(knots: &[(Number, Number)], u: f64) -> f64 {
    let idx = knots.partition_point(|(x, _)| x.value() <= u);
    if idx >= knots.len() {
        return knots[knots.len() - 1].1.value();
    }
    let (x0, y0) = &knots[idx.saturating_sub(1)];
    let (x1, y1) = &knots[idx];
    if idx == 0 {
        return y1.value();
    }
    let s = (u - x0.value()) / (x1.value() - x0.value());
    y0.value() + s * (y1.value() - y0.value())
}

fn linear_table_exact(knots: &[(Number, Number)], u: &Rational) -> Option<Rational> {
    let mut idx = 0;
    for (x, _) in knots {
        if x.as_exact()? <= u {
            idx += 1;
        }
    }
    if idx >= knots.len() {
        return knots[knots.len() - 1].1.as_exact().cloned();
    }
    if idx == 0 {
        return knots[0].1.as_exact().cloned();
    }
    let (x0, y0) = (knots[idx - 1].0.as_exact()?, knots[idx - 1].1.as_exact()?);
    let (x1, y1) = (knots[idx].0.as_exact()?, knots[idx].1.as_exact()?);
    Some(y0 + (u - x0) * (y1 - y0) / (x1 - x0))
}

// ---------------------------------------------------------------------------
// Document form

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchDoc {
    from: Number,
    num: [Number; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    den: Option<[Number; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeDoc {
    kind: String,
    params: Vec<Number>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate: Option<Number>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    branches: Vec<BranchDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    table: Vec<[Number; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<TimeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factor: Option<Box<FunctionDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    monotone_in_u: Option<bool>,
}

impl FunctionDoc {
    fn bare(kind: &str) -> Self {
        FunctionDoc {
            kind: kind.to_string(),
            params: Vec::new(),
            rate: None,
            branches: Vec::new(),
            table: Vec::new(),
            time: None,
            factor: None,
            monotone_in_u: None,
        }
    }
}

fn single_param(doc: &FunctionDoc) -> Result<Number> {
    match doc.params.as_slice() {
        [p] => Ok(p.clone()),
        other => Err(Error::Spec(format!(
            "{} takes exactly one parameter, got {}",
            doc.kind,
            other.len()
        ))),
    }
}

impl TryFrom<FunctionDoc> for FunctionSpec {
    type Error = Error;

    fn try_from(doc: FunctionDoc) -> Result<Self> {
        let kind = match doc.kind.as_str() {
            "autonomous-rational-sigmoid" => Kind::RationalSigmoid {
                scale: single_param(&doc)?,
            },
            "constant" => Kind::Constant {
                value: single_param(&doc)?,
            },
            "polynomial" => Kind::Polynomial {
                coeffs: doc.params.clone(),
            },
            "piecewise-linear-table" => Kind::PiecewiseLinear {
                knots: doc
                    .table
                    .iter()
                    .map(|[u, v]| (u.clone(), v.clone()))
                    .collect(),
            },
            "separable-exponential-piecewise" => Kind::ExponentialPiecewise {
                rate: doc.rate.clone().unwrap_or_else(|| Number::integer(1)),
                branches: doc
                    .branches
                    .iter()
                    .map(|b| Branch {
                        start: b.from.clone(),
                        numerator: b.num.clone(),
                        denominator: b
                            .den
                            .clone()
                            .unwrap_or([Number::integer(1), Number::integer(0)]),
                    })
                    .collect(),
            },
            "product" => {
                let time = doc
                    .time
                    .as_ref()
                    .ok_or_else(|| Error::Spec("product needs a time factor".into()))?;
                let time = match time.kind.as_str() {
                    "exponential" => match time.params.as_slice() {
                        [rate] => TimeFactor::Exponential { rate: rate.clone() },
                        _ => return Err(Error::Spec("exponential time factor takes one rate".into())),
                    },
                    "polynomial" => TimeFactor::Polynomial {
                        coeffs: time.params.clone(),
                    },
                    other => return Err(Error::Spec(format!("unknown time factor {other:?}"))),
                };
                let factor = doc
                    .factor
                    .clone()
                    .ok_or_else(|| Error::Spec("product needs a u-factor".into()))?;
                Kind::Product {
                    time,
                    factor: Box::new(FunctionSpec::try_from(*factor)?),
                }
            }
            other => return Err(Error::Spec(format!("unknown kind {other:?}"))),
        };
        let mut spec = FunctionSpec::new(kind)?;
        spec.monotone_in_u = doc.monotone_in_u;
        Ok(spec)
    }
}

impl From<FunctionSpec> for FunctionDoc {
    fn from(spec: FunctionSpec) -> Self {
        let mut doc = FunctionDoc::bare(spec.kind.name());
        doc.monotone_in_u = spec.monotone_in_u;
        match spec.kind {
            Kind::RationalSigmoid { scale } => doc.params = vec![scale],
            Kind::Constant { value } => doc.params = vec![value],
            Kind::Polynomial { coeffs } => doc.params = coeffs,
            Kind::PiecewiseLinear { knots } => {
                doc.table = knots.into_iter().map(|(u, v)| [u, v]).collect()
            }
            Kind::ExponentialPiecewise { rate, branches } => {
                doc.rate = Some(rate);
                doc.branches = branches
                    .into_iter()
                    .map(|b| {
                        let unit = b.denominator[0] == Number::integer(1)
                            && b.denominator[1] == Number::integer(0);
                        BranchDoc {
                            from: b.start,
                            num: b.numerator,
                            den: (!unit).then_some(b.denominator),
                        }
                    })
                    .collect();
            }
            Kind::Product { time, factor } => {
                doc.time = Some(match time {
                    TimeFactor::Exponential { rate } => TimeDoc {
                        kind: "exponential".into(),
                        params: vec![rate],
                    },
                    TimeFactor::Polynomial { coeffs } => TimeDoc {
                        kind: "polynomial".into(),
                        params: coeffs,
                    },
                });
                doc.factor = Some(Box::new(FunctionDoc::from(*factor)));
            }
        }
        doc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn domain() -> SampleDomain {
        SampleDomain {
            t_end: 1.0,
            u_max: 10.0,
        }
    }

    #[test]
    fn sigmoid_values() {
        let f = parse_function_spec(
            &json!({"kind": "autonomous-rational-sigmoid", "params": [40]}),
            domain(),
        )
        .unwrap();
        assert_eq!(f.eval(0.3, 2.0).unwrap(), 32.0);
        assert_eq!(f.eval_exact(&q(0, 1), &q(2, 1)), Some(q(32, 1)));
        assert_eq!(f.eval_exact(&q(0, 1), &q(1, 120)), Some(q(40, 14401)));
        assert!((f.eval(0.0, 1e8).unwrap() - 40.0).abs() < 1e-6);
        assert_eq!(f.eval(0.0, -1e-12).unwrap(), 0.0);
        assert!(matches!(f.eval(0.0, -1e-6), Err(Error::NegativeState { .. })));
    }

    #[test]
    fn zero_constant_parses() {
        let f = parse_function_spec(&json!({"kind": "constant", "params": [0]}), domain()).unwrap();
        assert_eq!(f.eval(0.5, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_unknown_kind_and_bad_params() {
        for doc in [
            json!({"kind": "spline", "params": [1]}),
            json!({"kind": "constant", "params": [1, 2]}),
            json!({"kind": "constant", "params": [1], "extra": 3}),
            json!({"kind": "constant", "params": [-1]}),
            json!({"kind": "piecewise-linear-table", "table": [[0, 1], [0, 2]]}),
        ] {
            assert!(parse_function_spec(&doc, domain()).is_err(), "{doc}");
        }
    }

    #[test]
    fn rejects_discontinuous_branches() {
        let doc = json!({
            "kind": "separable-exponential-piecewise",
            "rate": 0,
            "branches": [
                {"from": 0, "num": [0, 1]},
                {"from": 1, "num": [2, 0]},
            ]
        });
        let err = parse_function_spec(&doc, domain()).unwrap_err();
        assert!(err.to_string().contains("discontinuous at u = 1"), "{err}");
    }

    #[test]
    fn piecewise_table_interpolates_and_saturates() {
        let doc = json!({"kind": "piecewise-linear-table", "table": [[0, 0], [2, 4], ["5/2", 4]]});
        let f = parse_function_spec(&doc, domain()).unwrap();
        assert_eq!(f.eval(0.0, 1.0).unwrap(), 2.0);
        assert_eq!(f.eval(0.0, 9.0).unwrap(), 4.0);
        assert_eq!(f.eval_exact(&q(0, 1), &q(1, 3)), Some(q(2, 3)));
    }

    #[test]
    fn product_and_polynomial() {
        let doc = json!({
            "kind": "product",
            "time": {"kind": "polynomial", "params": [1, 1]},
            "factor": {"kind": "polynomial", "params": [0, 0, 1]}
        });
        let f = parse_function_spec(&doc, domain()).unwrap();
        assert_eq!(f.eval(0.5, 2.0).unwrap(), 6.0);
        assert_eq!(f.eval_exact(&q(1, 2), &q(2, 1)), Some(q(6, 1)));
        let bad = json!({
            "kind": "product",
            "time": {"kind": "exponential", "params": [1]},
            "factor": {"kind": "product", "time": {"kind": "polynomial", "params": [1]},
                       "factor": {"kind": "constant", "params": [1]}}
        });
        assert!(parse_function_spec(&bad, domain()).is_err());
    }

    #[test]
    fn negative_values_rejected_with_location() {
        let doc = json!({"kind": "polynomial", "params": [1, -1]});
        let err = parse_function_spec(&doc, domain()).unwrap_err();
        assert!(err.to_string().contains("is negative"), "{err}");
    }

    #[test]
    fn wrong_monotone_hint_rejected() {
        let doc = json!({"kind": "polynomial", "params": [30, -6, "1/2"], "monotone_in_u": true});
        assert!(parse_function_spec(&doc, domain()).is_err());
    }

    #[test]
    fn document_round_trip() {
        let doc = json!({
            "kind": "separable-exponential-piecewise",
            "rate": 1,
            "branches": [
                {"from": 0, "num": [0, "2/25"]},
                {"from": 1, "num": ["-2167/75", "2173/75"]},
                {"from": 4, "num": [87, 0]},
            ],
            "monotone_in_u": true
        });
        let f: FunctionSpec = serde_json::from_value(doc.clone()).unwrap();
        assert_eq!(serde_json::to_value(&f).unwrap(), doc);
    }
}
