use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use zlab::falgebra::{eval_function, parse_function, FunctionExpr};
use zlab::hop::{apply_h, chain_product, factorization_eval, h_matrix, mean_value_point, Mode, OffsetMode, SegmentSpec};
use zlab::ladder::{Interval, LadderContext};
use zlab::Error;

fn ctx() -> &'static LadderContext {
    static CTX: OnceLock<LadderContext> = OnceLock::new();
    CTX.get_or_init(LadderContext::default)
}

fn f(text: &str) -> FunctionExpr {
    parse_function(text).unwrap()
}

fn trig_seg(base: f64, u: f64) -> SegmentSpec {
    SegmentSpec::new(base, u, OffsetMode::PiL, None).unwrap()
}

fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(a + h * i as f64);
    }
    s * h / 3.0
}

#[test]
fn constant_function_collapses_chains() {
    let one = f("1*sin2 + 1*cos2");
    let seg = trig_seg(200.0, 1.0);
    let data = apply_h(&one, &seg, 2, ctx()).unwrap();
    for (a, b) in data.alpha[1..].iter().zip(&data.beta) {
        assert_eq!(a, b);
    }
    assert!((data.h_value - 1.0).abs() < 1e-12);
    assert!((data.f_alpha0 - 1.0).abs() < 1e-12);
    let rep = factorization_eval(&data, Mode::Exact, ctx()).unwrap();
    assert_eq!(rep.lhs_product, 1.0);
    assert!(rep.residual < 1e-10);
}

#[test]
fn sin2_identity_with_independent_stage_integrals() {
    let c = ctx();
    let sin2 = f("sin2");
    let seg = trig_seg(200.0, 1.0);
    let data = apply_h(&sin2, &seg, 2, c).unwrap();
    assert!(factorization_eval(&data, Mode::Exact, c).unwrap().residual <= 1e-5);

    let s0 = seg.interval();
    let b0_exact = 0.5 - ((2.0 * s0.hi).sin() - (2.0 * s0.lo).sin()) / 4.0;
    assert!((data.stage_b[0] - b0_exact).abs() < 1e-9);

    for r in 1..=2 {
        let sr = data.segments[r];
        let pull = |t: f64| {
            let mut x = t;
            for _ in 0..r {
                x = c.ladder_phi1(x).unwrap();
            }
            x.clamp(s0.lo, s0.hi).sin().powi(2)
        };
        let a = simpson(|t| pull(t) * c.z_tilde_sq(t).unwrap(), sr.lo, sr.hi, 4000);
        let b = simpson(pull, sr.lo, sr.hi, 4000);
        assert!(((data.stage_a[r - 1] - a) / a).abs() < 1e-6, "A_{r}: {} vs {a}", data.stage_a[r - 1]);
        assert!(((data.stage_b[r] - b) / b).abs() < 1e-6, "B_{r}: {} vs {b}", data.stage_b[r]);
        // substitution: A_r equals B_{r-1}
        assert!(((a - data.stage_b[r - 1]) / a).abs() < 1e-6);
    }
    for r in 1..=2 {
        assert!(data.segments[r].contains(data.alpha[r]) && data.segments[r].contains(data.beta[r - 1]));
    }
}

#[test]
fn sin2_identity_orders_one_to_three() {
    let seg = trig_seg(200.0, 1.0);
    for k in 1..=3 {
        let data = apply_h(&f("sin2"), &seg, k, ctx()).unwrap();
        let rep = factorization_eval(&data, Mode::Exact, ctx()).unwrap();
        assert!(rep.residual <= 1e-5, "k = {k}: {}", rep.residual);
    }
}

#[test]
fn power_alpha0_closed_form() {
    let seg = SegmentSpec::new(1000.0, 0.5, OffsetMode::L, Some(0.9)).unwrap();
    let data = apply_h(&f("pow(0.5)"), &seg, 1, ctx()).unwrap();
    let level = data.stage_b[1] / data.segments[1].len();
    let expected = 1000.0 + level * level;
    assert!((data.alpha[0] - expected).abs() < 1e-9, "{} vs {expected}", data.alpha[0]);
    assert!(data.alpha[0] > 1000.0 && data.alpha[0] < 1000.5);
    assert!(factorization_eval(&data, Mode::Exact, ctx()).unwrap().residual <= 1e-5);
}

#[test]
fn mean_value_points() {
    let c = ctx();
    let s0 = Interval::new(1000.0, 1001.0).unwrap();
    let s1 = c.reverse_segment(s0).unwrap();
    let t = mean_value_point(s1, |t| c.z_tilde_sq(t), s0.len() / s1.len()).unwrap();
    assert!(s1.contains(t));
    assert!((c.z_tilde_sq(t).unwrap() * s1.len() / s0.len() - 1.0).abs() < 1e-8);

    let lo = 300.0 * PI;
    let avg = simpson(|t| t.sin().powi(2), lo, lo + 1.0, 2000);
    let t = mean_value_point(Interval::new(lo, lo + 1.0).unwrap(), |t| Ok(t.sin().powi(2)), avg).unwrap();
    assert!(t > lo && t < lo + 1.0);
    assert!((t.sin().powi(2) - avg).abs() < 1e-9);

    let none = mean_value_point(Interval::new(lo, lo + 1.0).unwrap(), |_| Ok(0.5), 2.0);
    assert!(matches!(none, Err(Error::NotFound { .. })));
}

#[test]
fn h_matrix_shapes() {
    let seg = trig_seg(200.0, 1.0);
    let m1 = h_matrix(&f("sin2"), &seg, 1, ctx()).unwrap();
    assert_eq!(m1.shape(), (1, 3));
    let m3 = h_matrix(&f("sin2"), &seg, 3, ctx()).unwrap();
    assert_eq!(m3.shape(), (3, 7));
    let s0 = seg.interval();
    for (i, row) in m3.rows.iter().enumerate() {
        let k = i + 1;
        assert_eq!(m3.meaningful(k), 2 * k + 1);
        assert!(row[2 * k + 1..].iter().all(|&x| x == 0.0));
        assert!(row[..2 * k + 1].iter().all(|&x| x > 0.0));
        assert!(row[0] > s0.lo && row[0] < s0.hi, "row {k}: alpha0 = {}", row[0]);
    }
}

#[test]
fn beta_chain_ignores_f() {
    let seg = trig_seg(200.0, 1.0);
    let base = apply_h(&f("1*sin2 + 1*cos2"), &seg, 3, ctx()).unwrap();
    for text in ["sin2", "cos2", "0.3*sin2 + 2*cos2"] {
        let d = apply_h(&f(text), &seg, 3, ctx()).unwrap();
        for (x, y) in d.beta.iter().zip(&base.beta) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn zeta_mode_within_band_and_consistent_with_exact() {
    let c = ctx();
    let seg = trig_seg(1000.0, 1.0);
    let t = seg.start();
    let band = 5.0 * t.ln().ln() / t.ln();
    for k in 1..=3 {
        let data = apply_h(&f("sin2"), &seg, k, c).unwrap();
        let zeta = factorization_eval(&data, Mode::Zeta, c).unwrap();
        assert!(zeta.residual <= band, "k = {k}: {} > {band}", zeta.residual);
        let exact = chain_product(&data, Mode::Exact, c).unwrap();
        let mut expected = 1.0;
        for (a, b) in data.alpha[1..].iter().zip(&data.beta) {
            expected *= c.v_prime(c.ladder_phi1(*a).unwrap()) / c.v_prime(c.ladder_phi1(*b).unwrap());
        }
        assert!((zeta.lhs_product / exact / expected - 1.0).abs() < 1e-6);
    }
}

#[test]
fn zero_at_alpha0_is_degenerate() {
    let seg = trig_seg(200.0, 1.0);
    let mut data = apply_h(&f("sin2"), &seg, 1, ctx()).unwrap();
    data.f_alpha0 = 0.0;
    assert!(matches!(factorization_eval(&data, Mode::Exact, ctx()), Err(Error::Degenerate(_))));
}

#[test]
fn h_value_matches_mean() {
    let seg = SegmentSpec::new(3000.0, 0.8, OffsetMode::L, Some(0.9)).unwrap();
    let data = apply_h(&f("pow(0.4) + pow(0.3)"), &seg, 1, ctx()).unwrap();
    let expected = 0.8f64.powf(0.4) / 1.4 + 0.8f64.powf(0.3) / 1.3;
    assert!((data.h_value - expected).abs() < 1e-8);
    let s = seg.interval();
    assert!((eval_function(&data.function, data.alpha[0], s.lo).unwrap() - data.f_alpha0).abs() == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_identity_holds(family in 0usize..4, base in 100u32..4000, u in 0.1f64..0.95, k in 1usize..=3) {
        let (text, seg) = match family {
            0 => ("sin2", trig_seg(base as f64, u)),
            1 => ("cos2", trig_seg(base as f64, u)),
            2 => ("pow(0.5)", SegmentSpec::new(base as f64, u, OffsetMode::L, Some(0.95)).unwrap()),
            _ => ("pow(0.4) + 2*pow(0.3)", SegmentSpec::new(base as f64, u, OffsetMode::L, Some(0.95)).unwrap()),
        };
        let data = apply_h(&f(text), &seg, k, ctx()).unwrap();
        let rep = factorization_eval(&data, Mode::Exact, ctx()).unwrap();
        prop_assert!(rep.residual <= 1e-5, "{} L={} U={} k={}: {}", text, base, u, k, rep.residual);
        let s0 = seg.interval();
        prop_assert!(data.alpha[0] > s0.lo && data.alpha[0] < s0.hi);
        prop_assert!(data.stage_a.iter().chain(&data.stage_b).all(|&x| x > 0.0));
    }
}
