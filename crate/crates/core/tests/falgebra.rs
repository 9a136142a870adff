use std::f64::consts::PI;

use proptest::prelude::*;
use zlab::falgebra::{eval_function, mean_integral_symbolic, parse_function, structural_factor, Convention};
use zlab::Error;

// Composite Simpson on x = start + U·y⁴, y ∈ [0, 1]. The substitution smooths
// the (x − L)^Δ endpoint singularity so plain Simpson converges fast.
fn mean_oracle(f: impl Fn(f64) -> f64, start: f64, u: f64) -> f64 {
    let n = 4000;
    let h = 1.0 / n as f64;
    let g = |y: f64| f(start + u * y.powi(4)) * 4.0 * u * y.powi(3);
    let mut s = g(0.0) + g(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    s * h / 3.0 / u
}

fn check(text: &str, base: f64, u: f64) -> (f64, f64) {
    let f = parse_function(text).unwrap();
    let start = match f.convention() {
        Convention::Trig => PI * base,
        Convention::Power => base,
    };
    let symbolic = mean_integral_symbolic(&f).eval(u);
    let numeric = mean_oracle(|t| eval_function(&f, t, start).unwrap(), start, u);
    (symbolic, numeric)
}

#[test]
fn closed_forms_match_quadrature() {
    for (text, base, u) in [
        ("sin2", 300.0, 1.0),
        ("cos2", 300.0, 0.37),
        ("3*sin2 + 0.5*cos2", 1000.0, 0.8),
        ("pow(0.5)", 1000.0, 0.5),
        ("pow(0.4) + pow(0.3)", 300.0, 0.9),
        ("2.5*pow(0.7)", 5000.0, 0.2),
        ("pow(1.5)", 400.0, 0.6),
    ] {
        let (s, n) = check(text, base, u);
        assert!((s - n).abs() <= 1e-9 * s.abs().max(1.0), "{text}: symbolic {s}, quadrature {n}");
    }
}

#[test]
fn linear_power_mean() {
    let (s, n) = check("pow(1)", 1000.0, 0.5);
    assert!((s - 0.25).abs() < 1e-15 && (n - 0.25).abs() < 1e-12);
}

#[test]
fn structural_factor_is_reciprocal() {
    let f = parse_function("sin2").unwrap();
    let sf = structural_factor(&f);
    assert!((sf.eval(1.0, 0.0).unwrap() * 1f64.sin().powi(2) - 1.0).abs() < 1e-15);
    assert!(matches!(sf.eval(0.0, 0.0), Err(Error::Degenerate(_))));
    assert_eq!(sf.to_string(), "1/sin^2(a0)");
    let p = structural_factor(&parse_function("pow(0.4)+pow(0.3)").unwrap());
    assert_eq!(p.render_at("a0"), "1/[(a0-L)^0.4 + (a0-L)^0.3]");
}

#[test]
fn dsl_rejects_bad_input() {
    for bad in ["", "pow(0)", "pow(0.4)+pow(0.4)", "sin2 + pow(0.5)", "tan2", "0*sin2", "pow(-0.2)", "sin2 +"] {
        assert!(parse_function(bad).is_err(), "{bad:?} should be rejected");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_closed_form(delta_milli in 1u32..1000, base in 100u32..20000, u in 0.05f64..1.0) {
        let text = format!("pow({}.{:03})", delta_milli / 1000, delta_milli % 1000);
        let (s, n) = check(&text, base as f64, u);
        prop_assert!((s - n).abs() <= 1e-9 * s.abs().max(1.0), "{} {} {}", text, s, n);
    }

    #[test]
    fn trig_closed_form(base in 32u32..20000, u in 0.05f64..1.0, a in 1u32..40, b in 0u32..40) {
        let text = format!("{}.{}*sin2 + {}.{}*cos2", a / 10, a % 10, b / 10, b % 10);
        let text = if b == 0 { format!("{}.{}*sin2", a / 10, a % 10) } else { text };
        let (s, n) = check(&text, base as f64, u);
        prop_assert!((s - n).abs() <= 1e-9 * s.abs().max(1.0), "{} {} {}", text, s, n);
    }
}
