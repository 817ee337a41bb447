//! The two reference problems with their threshold triples, in exact form.

use crate::catalog::{Branch, FunctionSpec};
use crate::certifier::ThresholdTriple;
use crate::number::Number;
use crate::problem::Problem;

fn n(v: i64) -> Number {
    Number::integer(v)
}

fn r(p: i64, q: i64) -> Number {
    Number::ratio(p, q)
}

/// `f(u) = 40 u^2 / (1 + u^2)` with `T = 1, eta = 1/3, alpha = 3, beta = 1/2`.
pub fn first_problem() -> Problem {
    let f = FunctionSpec::rational_sigmoid(n(40))
        .expect("valid spec")
        .with_monotone_hint(true);
    Problem::new(n(1), r(1, 3), n(3), r(1, 2), f).expect("valid problem")
}

pub fn first_thresholds() -> ThresholdTriple {
    ThresholdTriple::new(r(1, 120), n(2), n(124)).expect("positive")
}

/// `h(u)`: `(2/25) u` up to 1, `(2173 u - 2167)/75` up to 4, `87` up to
/// 544, `(87/544) u` up to 546, then `39 (3u + 189) / (u + 270)`.
pub fn second_h() -> FunctionSpec {
    let branches = vec![
        Branch::linear(n(0), n(0), r(2, 25)),
        Branch::linear(n(1), r(-2167, 75), r(2173, 75)),
        Branch::linear(n(4), n(87), n(0)),
        Branch::linear(n(544), n(0), r(87, 544)),
        Branch::fraction(n(546), [n(39 * 189), n(39 * 3)], [n(270), n(1)]),
    ];
    FunctionSpec::exponential_piecewise(n(1), branches)
        .expect("valid spec")
        .with_monotone_hint(true)
}

/// `f(t, u) = exp(-t) h(u)` with `T = 1, eta = 1/2, alpha = 1, beta = 1`.
pub fn second_problem() -> Problem {
    Problem::new(n(1), r(1, 2), n(1), n(1), second_h()).expect("valid problem")
}

pub fn second_thresholds() -> ThresholdTriple {
    ThresholdTriple::new(r(1, 4), n(4), n(544)).expect("positive")
}
