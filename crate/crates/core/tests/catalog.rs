use serde_json::json;
use tpbvp_core::catalog::{parse_function_spec, SampleDomain};
use tpbvp_core::number::{parse_rational, Rational};
use tpbvp_core::presets;

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

#[test]
fn sigmoid_exact_values() {
    let p = presets::first_problem();
    let f = p.f();
    assert_eq!(f.eval_exact(&q("0"), &q("2")), Some(q("32")));
    assert_eq!(f.eval_exact(&q("0"), &q("1/120")), Some(q("40/14401")));
    assert_eq!(f.eval(0.3, 2.0).unwrap(), 32.0);
}

#[test]
fn piecewise_branch_values() {
    let h = presets::second_h();
    assert_eq!(h.eval_exact(&q("0"), &q("4")), Some(q("87")));
    assert_eq!(h.eval_exact(&q("0"), &q("1")), Some(q("2/25")));
    assert_eq!(h.eval_exact(&q("0"), &q("300")), Some(q("87")));
    assert_eq!(h.eval_exact(&q("0"), &q("545")), Some(q("87") * q("545/544")));
    assert_eq!(h.eval(0.0, 4.0).unwrap(), 87.0);
    assert!((h.eval(1.0, 4.0).unwrap() - 87.0 / std::f64::consts::E).abs() < 1e-12);
}

#[test]
fn breakpoints_are_continuous() {
    let checks = presets::second_h().breakpoint_checks();
    let at: Vec<f64> = checks.iter().map(|c| c.at).collect();
    assert_eq!(at, vec![1.0, 4.0, 544.0, 546.0]);
    for c in &checks {
        assert!(c.is_continuous(), "{c:?}");
        assert!(c.gap <= 1e-9, "{c:?}");
    }
    // Both sides of the last breakpoint equal 39 * 1827 / 816 = 23751/272.
    let last = &checks[3];
    assert_eq!(last.exact_gap, Some(q("0")));
    assert_eq!(presets::second_h().eval_exact(&q("0"), &q("546")), Some(q("23751/272")));
}

#[test]
fn document_form_of_the_piecewise_function() {
    let doc = json!({
        "kind": "separable-exponential-piecewise",
        "rate": 1,
        "branches": [
            {"from": 0, "num": [0, "2/25"]},
            {"from": 1, "num": ["-2167/75", "2173/75"]},
            {"from": 4, "num": [87, 0]},
            {"from": 544, "num": [0, "87/544"]},
            {"from": 546, "num": [7371, 117], "den": [270, 1]}
        ],
        "monotone_in_u": true
    });
    let domain = SampleDomain { t_end: 1.0, u_max: 1000.0 };
    let f = parse_function_spec(&doc, domain).unwrap();
    assert_eq!(f, presets::second_h());
}

#[test]
fn jump_is_rejected() {
    let doc = json!({
        "kind": "separable-exponential-piecewise",
        "rate": 1,
        "branches": [{"from": 0, "num": [0, 1]}, {"from": 1, "num": [2, 0]}]
    });
    let err = parse_function_spec(&doc, SampleDomain { t_end: 1.0, u_max: 10.0 }).unwrap_err();
    assert!(err.to_string().contains("1"), "{err}");
}
