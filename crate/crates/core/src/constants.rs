//! Certification constants `gamma`, `m`, `delta` (and `Lambda`).
//!
//! ```text
//! gamma = min{ eta/T, alpha(beta+1)eta^2/(2T), alpha(beta+1)eta(T-eta)/(2T - alpha(beta+1)eta^2) }
//! m     = 2 Lambda / ( T^2 (2T(beta+1) + beta eta (alpha eta + 2) + alpha beta T^2) )
//! delta = min{ beta eta (T-eta)^2 / Lambda, alpha eta^2 (1+beta)(T-eta)^2 / (2 Lambda) }
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::number::{Number, Rational, Scalar};
use crate::problem::{lambda_constant, Params, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaTerm {
    /// `eta / T`
    EtaRatio,
    /// `alpha (beta+1) eta^2 / (2T)`
    Quadratic,
    /// `alpha (beta+1) eta (T - eta) / (2T - alpha (beta+1) eta^2)`
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaTerm {
    /// `beta eta (T-eta)^2 / Lambda`
    PointCondition,
    /// `alpha eta^2 (1+beta) (T-eta)^2 / (2 Lambda)`
    IntegralCondition,
}

/// First index attaining the minimum; ties go to the lower index.
fn argmin<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// The three candidate terms of `gamma`, each evaluated on its own.
pub fn gamma_terms<S: Scalar>(p: &Params<S>) -> Result<[S; 3]> {
    let two = S::from_int(2);
    let one = S::from_int(1);
    let ab = p.alpha.clone() * (p.beta.clone() + one);
    let denom = two.clone() * p.t_end.clone() - ab.clone() * p.eta.clone() * p.eta.clone();
    if denom <= S::from_int(0) {
        return Err(Error::GammaDomain {
            value: denom.to_string(),
        });
    }
    Ok([
        p.eta.clone() / p.t_end.clone(),
        ab.clone() * p.eta.clone() * p.eta.clone() / (two * p.t_end.clone()),
        ab * p.eta.clone() * (p.t_end.clone() - p.eta.clone()) / denom,
    ])
}

pub fn gamma<S: Scalar>(p: &Params<S>) -> Result<(S, GammaTerm)> {
    let terms = gamma_terms(p)?;
    let i = argmin(&terms);
    let which = [GammaTerm::EtaRatio, GammaTerm::Quadratic, GammaTerm::Interior][i];
    Ok((terms[i].clone(), which))
}

pub fn m_constant<S: Scalar>(p: &Params<S>) -> S {
    let two = S::from_int(2);
    let Params {
        t_end: t,
        eta,
        alpha,
        beta,
    } = p.clone();
    let inner = two.clone() * t.clone() * (beta.clone() + S::from_int(1))
        + beta.clone() * eta.clone() * (alpha.clone() * eta + two.clone())
        + alpha * beta * t.clone() * t.clone();
    two * lambda_constant(p) / (t.clone() * t * inner)
}

pub fn delta_terms<S: Scalar>(p: &Params<S>) -> [S; 2] {
    let lambda = lambda_constant(p);
    let gap = p.t_end.clone() - p.eta.clone();
    let gap2 = gap.clone() * gap;
    [
        p.beta.clone() * p.eta.clone() * gap2.clone() / lambda.clone(),
        p.alpha.clone() * p.eta.clone() * p.eta.clone() * (S::from_int(1) + p.beta.clone()) * gap2
            / (S::from_int(2) * lambda),
    ]
}

pub fn delta_constant<S: Scalar>(p: &Params<S>) -> (S, DeltaTerm) {
    let terms = delta_terms(p);
    let i = argmin(&terms);
    let which = [DeltaTerm::PointCondition, DeltaTerm::IntegralCondition][i];
    (terms[i].clone(), which)
}

/// All four constants for one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct LwConstants<S> {
    pub lambda: S,
    pub gamma: S,
    pub m: S,
    pub delta: S,
    pub gamma_argmin: GammaTerm,
    pub delta_argmin: DeltaTerm,
}

pub fn lw_constants<S: Scalar>(p: &Params<S>) -> Result<LwConstants<S>> {
    let (gamma, gamma_argmin) = gamma(p)?;
    let (delta, delta_argmin) = delta_constant(p);
    Ok(LwConstants {
        lambda: lambda_constant(p),
        gamma,
        m: m_constant(p),
        delta,
        gamma_argmin,
        delta_argmin,
    })
}

/// Constants of a [`Problem`], exact whenever its parameters are.
#[derive(Clone, Debug, PartialEq)]
pub struct Constants {
    pub lambda: Number,
    pub gamma: Number,
    pub m: Number,
    pub delta: Number,
    pub gamma_argmin: GammaTerm,
    pub delta_argmin: DeltaTerm,
}

impl Constants {
    pub fn compute(p: &Problem) -> Result<Constants> {
        match p.exact_params() {
            Some(exact) => Ok(Constants::from_exact(lw_constants(exact)?)),
            None => Ok(Constants::from_float(lw_constants(p.params())?)),
        }
    }

    pub fn from_exact(k: LwConstants<Rational>) -> Constants {
        Constants {
            lambda: Number::exact(k.lambda),
            gamma: Number::exact(k.gamma),
            m: Number::exact(k.m),
            delta: Number::exact(k.delta),
            gamma_argmin: k.gamma_argmin,
            delta_argmin: k.delta_argmin,
        }
    }

    pub fn from_float(k: LwConstants<f64>) -> Constants {
        Constants {
            lambda: Number::float(k.lambda),
            gamma: Number::float(k.gamma),
            m: Number::float(k.m),
            delta: Number::float(k.delta),
            gamma_argmin: k.gamma_argmin,
            delta_argmin: k.delta_argmin,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.gamma.is_exact() && self.m.is_exact() && self.delta.is_exact() && self.lambda.is_exact()
    }
}

/// Report form: decimal values plus exact fractions when available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub lambda: f64,
    pub gamma: f64,
    pub m: f64,
    pub delta: f64,
    pub gamma_argmin: GammaTerm,
    pub delta_argmin: DeltaTerm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactConstants>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactConstants {
    pub lambda: String,
    pub gamma: String,
    pub m: String,
    pub delta: String,
}

impl From<&Constants> for ConstantsReport {
    fn from(k: &Constants) -> Self {
        let exact = k.is_exact().then(|| ExactConstants {
            lambda: k.lambda.to_string(),
            gamma: k.gamma.to_string(),
            m: k.m.to_string(),
            delta: k.delta.to_string(),
        });
        ConstantsReport {
            lambda: k.lambda.value(),
            gamma: k.gamma.value(),
            m: k.m.value(),
            delta: k.delta.value(),
            gamma_argmin: k.gamma_argmin,
            delta_argmin: k.delta_argmin,
            exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn first_example_exact() {
        let p = Params::new(q(1, 1), q(1, 3), q(3, 1), q(1, 2));
        let k = lw_constants(&p).unwrap();
        assert_eq!(k.gamma, q(1, 4));
        assert_eq!(k.gamma_argmin, GammaTerm::Quadratic);
        assert_eq!(k.m, q(1, 3));
        assert_eq!(k.delta, q(4, 45));
        assert_eq!(k.delta_argmin, DeltaTerm::PointCondition);
        assert_eq!(delta_terms(&p)[1], q(2, 15));
    }

    #[test]
    fn second_example_exact() {
        let p = Params::new(q(1, 1), q(1, 2), q(1, 1), q(1, 1));
        let k = lw_constants(&p).unwrap();
        assert_eq!((k.gamma.clone(), k.m.clone(), k.delta.clone()), (q(1, 4), q(4, 25), q(1, 8)));
        assert_eq!(k.delta_argmin, DeltaTerm::IntegralCondition);
        assert_eq!(delta_terms(&p)[0], q(1, 4));
    }

    #[test]
    fn m_without_beta() {
        let p = Params::new(q(1, 1), q(1, 2), q(1, 1), q(0, 1));
        assert_eq!(m_constant(&p), q(7, 4));
    }

    #[test]
    fn gamma_domain_error_is_loud() {
        // 2T - alpha (beta+1) eta^2 = 2 - 7.5 * 0.25 * 1.2 < 0
        let p = Params::new(1.0, 0.5, 7.5, 0.2);
        assert!(matches!(gamma(&p), Err(Error::GammaDomain { .. })));
    }

    #[test]
    fn ties_resolve_to_lower_index() {
        assert_eq!(argmin(&[1.0, 1.0, 2.0]), 0);
        assert_eq!(argmin(&[3.0, 1.0, 1.0]), 1);
    }
}
