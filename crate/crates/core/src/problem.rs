//! The boundary-value problem
//!
//! ```text
//! u''(t) + f(t, u) = 0,  0 < t < T,
//! u(0) = beta u(eta),  u(T) = alpha int_0^eta u(s) ds
//! ```
//!
//! together with the parameter hypotheses and the structural constant
//! `Lambda = (2T - alpha eta^2) - beta (alpha eta^2 - 2 eta + 2T)`.

use serde::Serialize;

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::number::{strictly_less, Number, Rational, Scalar};

/// The scalar parameters `(T, eta, alpha, beta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Params<S> {
    pub t_end: S,
    pub eta: S,
    pub alpha: S,
    pub beta: S,
}

impl<S: Scalar> Params<S> {
    pub fn new(t_end: S, eta: S, alpha: S, beta: S) -> Self {
        Params {
            t_end,
            eta,
            alpha,
            beta,
        }
    }

    pub fn to_f64(&self) -> Params<f64> {
        Params {
            t_end: self.t_end.to_f64(),
            eta: self.eta.to_f64(),
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
        }
    }

    /// `2T / eta^2`, the exclusive upper bound on alpha.
    pub fn alpha_bound(&self) -> S {
        S::from_int(2) * self.t_end.clone() / (self.eta.clone() * self.eta.clone())
    }

    /// `alpha eta^2 - 2 eta + 2T`.
    pub fn beta_denominator(&self) -> S {
        let two = S::from_int(2);
        self.alpha.clone() * self.eta.clone() * self.eta.clone() - two.clone() * self.eta.clone()
            + two * self.t_end.clone()
    }

    /// `(2T - alpha eta^2) / (alpha eta^2 - 2 eta + 2T)`, the exclusive upper
    /// bound on beta. This is also the one beta for which the linear problem
    /// is singular.
    pub fn beta_bound(&self) -> S {
        let num = S::from_int(2) * self.t_end.clone()
            - self.alpha.clone() * self.eta.clone() * self.eta.clone();
        num / self.beta_denominator()
    }
}

/// `Lambda = (2T - alpha eta^2) - beta (alpha eta^2 - 2 eta + 2T)`.
pub fn lambda_constant<S: Scalar>(p: &Params<S>) -> S {
    let two = S::from_int(2);
    (two * p.t_end.clone() - p.alpha.clone() * p.eta.clone() * p.eta.clone())
        - p.beta.clone() * p.beta_denominator()
}

/// A problem instance: parameters (with their exact form when every one of
/// them was given as a rational) and the nonlinearity.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    params: Params<f64>,
    exact: Option<Params<Rational>>,
    raw: Params<Number>,
    f: FunctionSpec,
}

impl Problem {
    pub fn new(t_end: Number, eta: Number, alpha: Number, beta: Number, f: FunctionSpec) -> Result<Self> {
        for (name, v) in [("T", &t_end), ("eta", &eta), ("alpha", &alpha), ("beta", &beta)] {
            if !v.is_finite() {
                return Err(Error::Problem(format!("{name} = {v} is not finite")));
            }
        }
        let exact = match (t_end.as_exact(), eta.as_exact(), alpha.as_exact(), beta.as_exact()) {
            (Some(t), Some(e), Some(a), Some(b)) => {
                Some(Params::new(t.clone(), e.clone(), a.clone(), b.clone()))
            }
            _ => None,
        };
        let params = Params::new(t_end.value(), eta.value(), alpha.value(), beta.value());
        Ok(Problem {
            params,
            exact,
            raw: Params {
                t_end,
                eta,
                alpha,
                beta,
            },
            f,
        })
    }

    /// Float-only problem.
    pub fn from_f64(params: Params<f64>, f: FunctionSpec) -> Result<Self> {
        Problem::new(
            Number::float(params.t_end),
            Number::float(params.eta),
            Number::float(params.alpha),
            Number::float(params.beta),
            f,
        )
    }

    pub fn params(&self) -> &Params<f64> {
        &self.params
    }

    pub fn exact_params(&self) -> Option<&Params<Rational>> {
        self.exact.as_ref()
    }

    /// The parameters as supplied.
    pub fn raw_params(&self) -> &Params<Number> {
        &self.raw
    }

    pub fn f(&self) -> &FunctionSpec {
        &self.f
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn t_end(&self) -> f64 {
        self.params.t_end
    }

    pub fn eta(&self) -> f64 {
        self.params.eta
    }

    /// Same parameters, different nonlinearity.
    pub fn with_f(&self, f: FunctionSpec) -> Problem {
        Problem { f, ..self.clone() }
    }

    /// `Lambda`, exact when the parameters are.
    pub fn lambda(&self) -> Number {
        match &self.exact {
            Some(p) => Number::exact(lambda_constant(p)),
            None => Number::float(lambda_constant(&self.params)),
        }
    }
}

/// Nodes per axis of the sampled nonnegativity check.
pub const H1_SAMPLE_NODES: usize = 64;
/// Default `u` extent of the sampled check when no thresholds are known.
pub const DEFAULT_U_MAX: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// `T > 0` and `0 < eta < T`.
    pub interval_ok: bool,
    pub h2_alpha_ok: bool,
    pub h2_beta_ok: bool,
    /// `f >= 0` at every sample node and `f > 0` at some node.
    pub h1_sampled_ok: bool,
    /// Whether the parameter checks ran in exact arithmetic.
    pub exact: bool,
    pub u_max: f64,
    pub messages: Vec<String>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.interval_ok && self.h2_alpha_ok && self.h2_beta_ok && self.h1_sampled_ok
    }

    pub fn h2_ok(&self) -> bool {
        self.interval_ok && self.h2_alpha_ok && self.h2_beta_ok
    }
}

struct H2Flags {
    interval_ok: bool,
    alpha_ok: bool,
    beta_ok: bool,
}

fn check_h2<S: Scalar>(p: &Params<S>, messages: &mut Vec<String>) -> H2Flags {
    let zero = S::from_int(0);
    let interval_ok = strictly_less(&zero, &p.t_end)
        && strictly_less(&zero, &p.eta)
        && strictly_less(&p.eta, &p.t_end);
    if !interval_ok {
        messages.push(format!(
            "H2: need T > 0 and 0 < eta < T, got T = {}, eta = {}",
            p.t_end, p.eta
        ));
        return H2Flags {
            interval_ok,
            alpha_ok: false,
            beta_ok: false,
        };
    }

    let alpha_bound = p.alpha_bound();
    let alpha_ok = strictly_less(&zero, &p.alpha) && strictly_less(&p.alpha, &alpha_bound);
    if !alpha_ok {
        messages.push(format!(
            "H2: need 0 < alpha < 2T/eta^2 = {}, got alpha = {}",
            alpha_bound, p.alpha
        ));
    }

    let denom = p.beta_denominator();
    let beta_ok = if strictly_less(&zero, &denom) {
        let beta_bound = p.beta_bound();
        let ok = strictly_less(&zero, &p.beta) && strictly_less(&p.beta, &beta_bound);
        if !ok {
            messages.push(format!(
                "H2: need 0 < beta < (2T - alpha eta^2)/(alpha eta^2 - 2eta + 2T) = {}, got beta = {}",
                beta_bound, p.beta
            ));
        }
        ok
    } else {
        messages.push(format!(
            "H2: alpha eta^2 - 2eta + 2T = {denom} is not positive"
        ));
        false
    };

    H2Flags {
        interval_ok,
        alpha_ok,
        beta_ok,
    }
}

/// Checks the parameter inequalities and samples `f` on a 64x64 grid of
/// `[0, T] x [0, u_max]`.
///
/// The non-vanishing part of the nonnegativity hypothesis cannot be decided
/// from samples; the surrogate used is "positive at some sample node".
pub fn validate_hypotheses(p: &Problem, u_max: f64) -> HypothesisReport {
    let mut messages = Vec::new();
    let flags = match p.exact_params() {
        Some(exact) => check_h2(exact, &mut messages),
        None => check_h2(p.params(), &mut messages),
    };

    let mut h1_ok = true;
    let mut any_positive = false;
    let t_end = p.t_end();
    if flags.interval_ok && u_max.is_finite() && u_max > 0.0 {
        let n = H1_SAMPLE_NODES;
        'outer: for i in 0..n {
            let t = t_end * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let u = u_max * j as f64 / (n - 1) as f64;
                match p.f().eval(t, u) {
                    Ok(v) if v < 0.0 => {
                        messages.push(format!("H1: f({t}, {u}) = {v} is negative"));
                        h1_ok = false;
                        break 'outer;
                    }
                    Ok(v) => any_positive |= v > 0.0,
                    Err(e) => {
                        messages.push(format!("H1: evaluation failed at ({t}, {u}): {e}"));
                        h1_ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if h1_ok && !any_positive {
            messages.push("H1: f vanishes at every sample node".to_string());
        }
    } else {
        h1_ok = false;
        messages.push(format!("H1: sample box [0, {t_end}] x [0, {u_max}] is degenerate"));
    }

    HypothesisReport {
        interval_ok: flags.interval_ok,
        h2_alpha_ok: flags.alpha_ok,
        h2_beta_ok: flags.beta_ok,
        h1_sampled_ok: h1_ok && any_positive,
        exact: p.is_exact(),
        u_max,
        messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::Number;

    fn sigmoid() -> FunctionSpec {
        FunctionSpec::rational_sigmoid(Number::integer(40)).unwrap()
    }

    fn problem(t: Number, eta: Number, alpha: Number, beta: Number) -> Problem {
        Problem::new(t, eta, alpha, beta, sigmoid()).unwrap()
    }

    #[test]
    fn first_example_parameters_pass() {
        let p = problem(Number::integer(1), Number::ratio(1, 3), Number::integer(3), Number::ratio(1, 2));
        let r = validate_hypotheses(&p, 10.0);
        assert!(r.passed(), "{:?}", r.messages);
        assert!(r.exact);
        let ex = p.exact_params().unwrap();
        assert_eq!(ex.alpha_bound(), Rational::from_int(18));
        assert_eq!(ex.beta_bound(), Rational::from_int(1));
    }

    #[test]
    fn second_example_parameters_pass() {
        let p = problem(Number::integer(1), Number::ratio(1, 2), Number::integer(1), Number::integer(1));
        assert!(validate_hypotheses(&p, 10.0).passed());
    }

    #[test]
    fn alpha_at_bound_fails_strictly() {
        let p = problem(Number::integer(1), Number::ratio(1, 2), Number::integer(8), Number::ratio(1, 10));
        let r = validate_hypotheses(&p, 10.0);
        assert!(!r.h2_alpha_ok);
        let p = Problem::from_f64(Params::new(1.0, 0.5, 8.0, 0.1), sigmoid()).unwrap();
        let r = validate_hypotheses(&p, 10.0);
        assert!(!r.h2_alpha_ok);
        assert!(r.messages.iter().any(|m| m.contains("alpha")));
    }

    #[test]
    fn eta_outside_interval() {
        let p = Problem::from_f64(Params::new(1.0, 1.5, 1.0, 0.1), sigmoid()).unwrap();
        let r = validate_hypotheses(&p, 10.0);
        assert!(!r.interval_ok && !r.passed());
    }

    #[test]
    fn zero_function_fails_sampled_h1() {
        let p = problem(Number::integer(1), Number::ratio(1, 3), Number::integer(3), Number::ratio(1, 2))
            .with_f(FunctionSpec::constant(Number::integer(0)).unwrap());
        let r = validate_hypotheses(&p, 10.0);
        assert!(r.h2_ok());
        assert!(!r.h1_sampled_ok);
    }

    #[test]
    fn lambda_values() {
        let ex1 = Params::new(Rational::from_int(1), Rational::new(1.into(), 3.into()), Rational::from_int(3), Rational::new(1.into(), 2.into()));
        assert_eq!(lambda_constant(&ex1), Rational::new(5.into(), 6.into()));
        let ex2 = Params::new(Rational::from_int(1), Rational::new(1.into(), 2.into()), Rational::from_int(1), Rational::from_int(1));
        assert_eq!(lambda_constant(&ex2), Rational::new(1.into(), 2.into()));
        let no_beta = Params::new(1.0, 0.5, 1.0, 0.0);
        assert_eq!(lambda_constant(&no_beta), 1.75);
    }

    #[test]
    fn non_finite_parameters_rejected() {
        assert!(Problem::from_f64(Params::new(1.0, f64::NAN, 1.0, 0.1), sigmoid()).is_err());
    }
}
