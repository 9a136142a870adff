use std::f64::consts::PI;

use num_complex::Complex64;
use zlab::zcore::{
    euler_maclaurin_z, hardy_z, riemann_siegel_theta, riemann_siegel_z, zeta_mod_sq_half, EvalAccuracy,
};
use zlab::Error;

// Lanczos (g = 7, n = 9) log-gamma; an evaluation path unrelated to the
// Stirling series used by the library.
fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

// θ(t) = Im lnΓ(¼ + it/2) − (t/2) ln π, with the branch of Im lnΓ followed
// continuously by summing the imaginary parts of the recurrence shift.
fn theta_oracle(t: f64) -> f64 {
    let shift = 30;
    let mut z = Complex64::new(0.25, t / 2.0);
    let mut im = 0.0;
    for _ in 0..shift {
        im -= z.arg();
        z += 1.0;
    }
    im + ln_gamma_lanczos(z).im - t / 2.0 * PI.ln()
}

#[test]
fn theta_matches_lanczos_oracle() {
    let acc = EvalAccuracy::default();
    let t = 2.0 * PI * std::f64::consts::E;
    let th = riemann_siegel_theta(t, &acc).unwrap();
    assert!((th - theta_oracle(t)).abs() < 1e-6);
    // reference values from 30-digit arithmetic
    assert!((th + 0.391_479_049_353_897_9).abs() < 1e-6, "{th}");

    let th = riemann_siegel_theta(14.134725, &acc).unwrap();
    assert!((th - theta_oracle(14.134725)).abs() < 1e-5);
    assert!((th + 1.728_670_304_117_276_5).abs() < 1e-5, "{th}");

    for t in [20.0, 55.5, 123.0, 999.0] {
        assert!((riemann_siegel_theta(t, &acc).unwrap() - theta_oracle(t)).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn theta_increasing() {
    let acc = EvalAccuracy::default();
    assert!(riemann_siegel_theta(20.0, &acc).unwrap() > riemann_siegel_theta(19.0, &acc).unwrap());
}

#[test]
fn theta_reports_unreachable_accuracy() {
    let tight = EvalAccuracy::new(1e-14, 1000).unwrap();
    assert!(matches!(
        riemann_siegel_theta(1.5, &tight),
        Err(Error::AccuracyUnreachable { .. })
    ));
}

#[test]
fn first_zero_is_bracketed() {
    let acc = EvalAccuracy::default();
    let a = hardy_z(14.0, &acc).unwrap();
    let b = hardy_z(14.2, &acc).unwrap();
    assert!(a * b < 0.0, "Z(14.0) = {a}, Z(14.2) = {b}");
}

#[test]
fn zeta_small_at_first_zero() {
    let acc = EvalAccuracy::new(1e-5, 1_000_000).unwrap();
    assert!(zeta_mod_sq_half(14.134725141734693, &acc).unwrap() <= 1e-8);
}

#[test]
fn square_identity_and_sign() {
    let acc = EvalAccuracy::default();
    for t in [1.0, 7.3, 100.0, 250.25, 4321.0] {
        let z = hardy_z(t, &acc).unwrap();
        assert_eq!(zeta_mod_sq_half(t, &acc).unwrap(), z * z);
        assert!(zeta_mod_sq_half(t, &acc).unwrap() >= 0.0);
    }
    assert!(hardy_z(0.5, &acc).is_err());
}

#[test]
fn riemann_siegel_agrees_with_euler_maclaurin() {
    let acc = EvalAccuracy::new(1e-12, 1_000_000).unwrap();
    for t in [60.0, 100.0, 300.0] {
        let (rs, _) = riemann_siegel_z(t).unwrap();
        let em = euler_maclaurin_z(t, &acc).unwrap();
        assert!((rs - em).abs() < 1e-6, "t = {t}: {rs} vs {em}");
    }
    let worst = (0..100)
        .map(|i| 50.0 + 450.0 * i as f64 / 99.0)
        .map(|t| (riemann_siegel_z(t).unwrap().0 - euler_maclaurin_z(t, &acc).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "worst {worst:e}");
}

// Ordinates of the first ten nontrivial zeros (standard tables).
const ZEROS_BELOW_50: [f64; 10] = [
    14.134725142,
    21.022039639,
    25.010857580,
    30.424876126,
    32.935061588,
    37.586178159,
    40.918719012,
    43.327073281,
    48.005150881,
    49.773832478,
];

#[test]
fn sign_changes_below_50_match_known_zeros() {
    let acc = EvalAccuracy::default();
    let step = 0.01;
    let n = ((50.0 - 10.0) / step) as usize;
    let mut brackets = Vec::new();
    let mut prev = hardy_z(10.0, &acc).unwrap();
    for i in 1..=n {
        let t = 10.0 + step * i as f64;
        let z = hardy_z(t, &acc).unwrap();
        if (z < 0.0) != (prev < 0.0) {
            brackets.push((t - step, t));
        }
        prev = z;
    }
    assert_eq!(brackets.len(), ZEROS_BELOW_50.len());
    for ((a, b), zero) in brackets.iter().zip(ZEROS_BELOW_50) {
        assert!(*a - 1e-9 <= zero && zero <= *b + 1e-9, "zero {zero} outside [{a}, {b}]");
    }
}
