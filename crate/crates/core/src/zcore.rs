//! The Hardy Z-function on the critical line.
//!
//! Two independent routes: the Riemann–Siegel main sum with the C0..C4
//! correction series (heights ≥ 50), and Euler–Maclaurin summation of
//! ζ(½+it) rotated by the exact phase arg Γ(¼+it/2) − (t/2)ln π.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Heights at or above which the Riemann–Siegel route is preferred.
pub const RS_SWITCHOVER: f64 = 50.0;

/// Accuracy control for Z evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalAccuracy {
    target_abs_error: f64,
    max_terms: usize,
}

impl EvalAccuracy {
    pub fn new(target_abs_error: f64, max_terms: usize) -> Result<Self> {
        if !(target_abs_error > 0.0) {
            return Err(Error::Domain(format!(
                "target_abs_error must be positive, got {target_abs_error}"
            )));
        }
        if max_terms < 1 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        Ok(EvalAccuracy {
            target_abs_error,
            max_terms,
        })
    }

    pub fn target_abs_error(&self) -> f64 {
        self.target_abs_error
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for EvalAccuracy {
    fn default() -> Self {
        EvalAccuracy {
            target_abs_error: 1e-8,
            max_terms: 1_000_000,
        }
    }
}

/// Even-index Bernoulli numbers B_0, B_2, …, B_80 computed exactly.
fn bernoulli_even() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m_max = 80usize;
        // binomial rows built incrementally: sum_{k=0}^{m} C(m+1,k) B_k = 0
        let mut b: Vec<BigRational> = vec![BigRational::one()];
        let mut row: Vec<BigInt> = vec![BigInt::one(), BigInt::one()]; // C(1, ·)
        for m in 1..=m_max {
            let mut next = vec![BigInt::one(); m + 2];
            for k in 1..=m {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(row[k].clone()) * bk;
            }
            b.push(-acc / BigRational::from_integer(row[m].clone()));
        }
        b.into_iter().step_by(2).collect()
    })
}

/// B_{2k} as f64 for k = 0..=40.
fn bernoulli_f64(k: usize) -> f64 {
    bernoulli_even()[k].to_f64().unwrap_or(f64::NAN)
}

/// B_{2k}/(2k)! as f64 for k = 0..=40.
fn bernoulli_over_factorial() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut fact = BigInt::one();
        let mut out = Vec::new();
        for (k, bk) in bernoulli_even().iter().enumerate() {
            if k > 0 {
                fact *= BigInt::from(2 * k - 1) * BigInt::from(2 * k);
            }
            let q = bk / BigRational::from_integer(fact.clone());
            out.push(q.to_f64().unwrap_or(0.0));
        }
        out
    })
}

/// Asymptotic expansion of θ(t): value and the magnitude of the first
/// omitted correction term.
fn theta_asymptotic(t: f64) -> (f64, f64) {
    let mut value = 0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0;
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut power = inv;
    let mut prev = f64::INFINITY;
    for k in 1..=40usize {
        let two_k = 2 * k as i32;
        let coeff = (1.0 - 2f64.powi(1 - two_k)) * bernoulli_f64(k).abs() / (4.0 * k as f64 * (2 * k - 1) as f64);
        let term = coeff * power;
        if term >= prev {
            return (value, prev);
        }
        if term < 1e-17 * value.abs().max(1.0) {
            return (value, term);
        }
        value += term;
        prev = term;
        power *= inv2;
    }
    (value, prev)
}

/// Riemann–Siegel theta via its asymptotic expansion, truncated once the
/// next correction falls below the accuracy target.
pub fn riemann_siegel_theta(t: f64, acc: &EvalAccuracy) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("theta requires t >= 1, got {t}")));
    }
    let (value, bound) = theta_asymptotic(t);
    if bound > acc.target_abs_error {
        return Err(Error::AccuracyUnreachable {
            t,
            target: acc.target_abs_error,
            best: bound,
        });
    }
    Ok(value)
}

/// θ(t) = Im ln Γ(¼ + it/2) − (t/2) ln π, through a shifted Stirling series.
/// Valid for every t ≥ 0 and independent of the asymptotic expansion.
pub fn theta_log_gamma(t: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * t);
    let shift = if z.norm() < 15.0 { 15 } else { 0 };
    let mut w = z;
    let mut log_shift = Complex64::zero();
    for _ in 0..shift {
        log_shift += w.ln();
        w += 1.0;
    }
    let mut series = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wpow = w;
    for k in 1..=10usize {
        let coeff = bernoulli_f64(k) / ((2 * k) as f64 * (2 * k - 1) as f64);
        series += coeff / wpow;
        wpow *= w2;
    }
    (series - log_shift).im - 0.5 * t * PI.ln()
}

/// C0..C4 correction series in powers of z = 2p − 1: entry j of row k is the
/// coefficient of z^(2j + k mod 2).
const RS_COEFFS: [&[f64]; 5] = [
    &[
        0.382_683_432_365_089_771_73, 0.437_240_468_077_520_449_36, 0.132_376_575_480_343_523_32,
        -0.013_605_026_047_674_188_65, -0.013_567_621_970_103_580_89, -0.001_623_725_323_144_465_28,
        0.000_297_053_537_333_796_91, 0.000_079_433_008_795_214_70, 0.000_000_465_561_246_145_05,
        -0.000_001_432_725_163_095_51, -0.000_000_103_548_471_123_13, 0.000_000_012_357_927_083_86,
        0.000_000_001_788_108_385_80, -0.000_000_000_033_914_143_90, -0.000_000_000_016_326_633_90,
        -0.000_000_000_000_378_510_93, 0.000_000_000_000_093_274_23, 0.000_000_000_000_005_221_84,
        -0.000_000_000_000_000_335_07, -0.000_000_000_000_000_034_12, 0.000_000_000_000_000_000_58,
        0.000_000_000_000_000_000_15,
    ],
    &[
        -0.026_825_102_628_375_347_03, 0.013_784_773_426_351_853_05, 0.038_491_250_482_235_082_23,
        0.009_871_066_299_062_076_47, -0.003_310_759_760_858_404_33, -0.001_464_780_857_795_415_08,
        -0.000_013_207_940_624_876_96, 0.000_059_227_487_018_471_41, 0.000_005_980_242_585_373_45,
        -0.000_000_964_132_245_616_98, -0.000_000_183_347_337_227_14, 0.000_000_004_467_087_562_72,
        0.000_000_002_709_635_082_18, 0.000_000_000_077_852_886_54, -0.000_000_000_023_437_626_01,
        -0.000_000_000_001_583_017_28, 0.000_000_000_000_121_199_42, 0.000_000_000_000_014_583_78,
        -0.000_000_000_000_000_287_86, -0.000_000_000_000_000_086_63, -0.000_000_000_000_000_000_84,
        0.000_000_000_000_000_000_36, 0.000_000_000_000_000_000_01,
    ],
    &[
        0.005_188_542_830_293_168_49, 0.000_309_465_838_806_347_46, -0.011_335_941_078_229_373_38,
        0.002_233_045_741_958_144_77, 0.005_196_637_408_862_330_21, 0.000_343_991_440_762_083_37,
        -0.000_591_064_842_747_058_28, -0.000_102_299_725_479_358_57, 0.000_020_888_392_216_992_76,
        0.000_005_927_665_493_096_54, -0.000_000_164_238_383_624_36, -0.000_000_151_611_997_009_41,
        -0.000_000_005_907_803_698_21, 0.000_000_002_091_151_485_95, 0.000_000_000_178_156_495_83,
        -0.000_000_000_016_164_072_46, -0.000_000_000_002_380_696_25, 0.000_000_000_000_053_982_65,
        0.000_000_000_000_019_750_14, 0.000_000_000_000_000_233_33, -0.000_000_000_000_000_111_88,
        -0.000_000_000_000_000_004_16, 0.000_000_000_000_000_000_44, 0.000_000_000_000_000_000_03,
    ],
    &[
        -0.001_339_716_090_719_456_90, 0.003_744_215_136_379_393_70, -0.001_330_317_891_932_146_81,
        -0.002_265_466_076_547_178_71, 0.000_954_849_999_850_673_04, 0.000_601_003_845_896_360_39,
        -0.000_101_288_582_867_766_22, -0.000_068_657_334_492_998_26, 0.000_000_598_536_679_153_86,
        0.000_003_331_659_851_239_95, 0.000_000_219_192_891_024_35, -0.000_000_078_908_842_456_81,
        -0.000_000_009_414_685_081_30, 0.000_000_000_957_011_621_09, 0.000_000_000_187_631_374_53,
        -0.000_000_000_004_437_837_68, -0.000_000_000_002_242_673_85, -0.000_000_000_000_036_276_87,
        0.000_000_000_000_017_639_81, 0.000_000_000_000_000_796_08, -0.000_000_000_000_000_094_20,
        -0.000_000_000_000_000_007_13, 0.000_000_000_000_000_000_33, 0.000_000_000_000_000_000_04,
    ],
    &[
        0.000_464_833_893_617_633_82, -0.001_005_660_736_534_047_08, 0.000_240_448_565_737_257_93,
        0.001_028_308_614_970_232_19, -0.000_765_786_107_175_564_42, -0.000_203_652_868_030_848_18,
        0.000_232_122_904_910_687_28, 0.000_032_602_144_243_865_20, -0.000_025_579_062_517_949_53,
        -0.000_004_107_464_438_915_74, 0.000_001_178_111_364_037_13, 0.000_000_244_565_614_224_85,
        -0.000_000_023_915_824_767_34, -0.000_000_007_505_214_207_04, 0.000_000_000_133_122_794_16,
        0.000_000_000_134_406_267_54, 0.000_000_000_003_513_770_04, -0.000_000_000_001_519_154_45,
        -0.000_000_000_000_089_154_18, 0.000_000_000_000_011_195_89, 0.000_000_000_000_001_051_60,
        -0.000_000_000_000_000_051_79, -0.000_000_000_000_000_008_07, 0.000_000_000_000_000_000_11,
        0.000_000_000_000_000_000_04,
    ],
];

/// Remainder bound after the C4 correction: 0.017·t^(−11/4).
fn rs_remainder_bound(t: f64) -> f64 {
    0.017 * t.powf(-2.75)
}

fn correction_series(k: usize, z: f64) -> f64 {
    let z2 = z * z;
    let mut acc = 0.0;
    for &c in RS_COEFFS[k].iter().rev() {
        acc = acc * z2 + c;
    }
    if k % 2 == 1 {
        acc * z
    } else {
        acc
    }
}

struct LogTable {
    ln: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

fn log_table() -> &'static LogTable {
    static TABLE: OnceLock<LogTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 512;
        LogTable {
            ln: (0..=n).map(|i| (i.max(1) as f64).ln()).collect(),
            inv_sqrt: (0..=n).map(|i| 1.0 / (i.max(1) as f64).sqrt()).collect(),
        }
    })
}

/// Riemann–Siegel evaluation of Z(t) for t ≥ 2π; returns the value and an
/// error bound (truncation of the correction series plus theta truncation).
pub fn riemann_siegel_z(t: f64) -> Result<(f64, f64)> {
    if !(t >= 2.0 * PI) {
        return Err(Error::Domain(format!("Riemann-Siegel sum requires t >= 2*pi, got {t}")));
    }
    let (theta, theta_err) = theta_asymptotic(t);
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let table = log_table();
    let mut sum = 0.0;
    for k in 1..=n {
        let (ln, w) = if k < table.ln.len() {
            (table.ln[k], table.inv_sqrt[k])
        } else {
            let kf = k as f64;
            (kf.ln(), 1.0 / kf.sqrt())
        };
        sum += w * (theta - t * ln).cos();
    }
    let z = 2.0 * p - 1.0;
    let inv_a = 1.0 / a;
    let mut corr = 0.0;
    let mut pw = 1.0;
    for k in 0..5 {
        corr += correction_series(k, z) * pw;
        pw *= inv_a;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let value = 2.0 * sum + sign * inv_a.sqrt() * corr;
    Ok((value, rs_remainder_bound(t) + 4.0 * (n as f64).sqrt() * theta_err))
}

/// ζ(½+it) by Euler–Maclaurin summation, with an error estimate from the
/// last correction term used.
pub fn euler_maclaurin_zeta(t: f64, acc: &EvalAccuracy) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("Euler-Maclaurin evaluation requires t >= 0, got {t}")));
    }
    let s = Complex64::new(0.5, t);
    let n = 10 + (s.norm() / PI).ceil() as usize;
    if n > acc.max_terms {
        return Err(Error::AccuracyUnreachable {
            t,
            target: acc.target_abs_error,
            best: f64::INFINITY,
        });
    }
    let mut sum = Complex64::zero();
    for k in 1..n {
        let kf = k as f64;
        sum += Complex64::from_polar(kf.powf(-0.5), -t * kf.ln());
    }
    let nf = n as f64;
    let n_pow = Complex64::from_polar(nf.powf(-0.5), -t * nf.ln()); // N^{-s}
    sum += n_pow * nf / (s - 1.0) + 0.5 * n_pow;

    let coeffs = bernoulli_over_factorial();
    let mut poch = s;
    let mut npow = n_pow / nf; // N^{-s-1}
    let mut last = f64::INFINITY;
    let inv_n2 = 1.0 / (nf * nf);
    for k in 1..coeffs.len() {
        if k > 1 {
            let j = (2 * k - 3) as f64;
            poch *= (s + j) * (s + j + 1.0);
            npow *= inv_n2;
        }
        let term = poch * npow * coeffs[k];
        let mag = term.norm();
        if mag > last {
            break;
        }
        sum += term;
        last = mag;
        if mag < 1e-3 * acc.target_abs_error || mag < 1e-17 {
            return Ok(sum);
        }
    }
    if last > acc.target_abs_error {
        return Err(Error::AccuracyUnreachable {
            t,
            target: acc.target_abs_error,
            best: last,
        });
    }
    Ok(sum)
}

/// Z(t) = Re(e^{iθ(t)} ζ(½+it)) through Euler–Maclaurin; defined for t ≥ 0.
pub fn euler_maclaurin_z(t: f64, acc: &EvalAccuracy) -> Result<f64> {
    let zeta = euler_maclaurin_zeta(t, acc)?;
    let phase = Complex64::from_polar(1.0, theta_log_gamma(t));
    Ok((phase * zeta).re)
}

/// Hardy's Z(t) for t ≥ 1 with |error| ≤ target.
pub fn hardy_z(t: f64, acc: &EvalAccuracy) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("Z requires t >= 1, got {t}")));
    }
    hardy_z_from_zero(t, acc)
}

/// As [`hardy_z`] but also accepts 0 ≤ t < 1 (needed by the Hardy–Littlewood
/// integral, which starts at 0).
pub(crate) fn hardy_z_from_zero(t: f64, acc: &EvalAccuracy) -> Result<f64> {
    if t >= RS_SWITCHOVER {
        let (value, bound) = riemann_siegel_z(t)?;
        if bound <= acc.target_abs_error {
            return Ok(value);
        }
    }
    euler_maclaurin_z(t, acc)
}

/// |ζ(½+it)|² = Z(t)².
pub fn zeta_mod_sq_half(t: f64, acc: &EvalAccuracy) -> Result<f64> {
    let z = hardy_z(t, acc)?;
    Ok(z * z)
}
