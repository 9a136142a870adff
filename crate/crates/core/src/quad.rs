//! Adaptive Gauss–Kronrod (10/21) quadrature over deterministic seed panels.
//!
//! The panel partition and the recursion order depend only on the inputs, so
//! repeated integrations of the same interval are bit-for-bit reproducible.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerance and recursion cap for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_depth: u32,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: 0.0,
            max_depth: 40,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::relative(1e-12)
    }
}

struct PanelEstimate<const N: usize> {
    value: [f64; N],
    error: f64,
    abs_mass: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<PanelEstimate<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];

    let fc = f(center)?;
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut res_abs = [0.0; N];
    for c in 0..N {
        kron[c] = WGK[10] * fc[c];
        res_abs[c] = WGK[10] * fc[c].abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        for c in 0..N {
            kron[c] += WGK[j] * (lo[c] + hi[c]);
            res_abs[c] += WGK[j] * (lo[c].abs() + hi[c].abs());
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * (lo[c] + hi[c]);
            }
        }
        fv1[j] = lo;
        fv2[j] = hi;
    }

    let mut error = 0.0_f64;
    let mut abs_mass = 0.0_f64;
    let mut value = [0.0; N];
    for c in 0..N {
        let mean = 0.5 * kron[c];
        let mut res_asc = WGK[10] * (fc[c] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv1[j][c] - mean).abs() + (fv2[j][c] - mean).abs());
        }
        let e = rescale_error(
            (kron[c] - gauss[c]) * half,
            res_abs[c] * half.abs(),
            res_asc * half.abs(),
        );
        error = error.max(e);
        abs_mass = abs_mass.max(res_abs[c] * half.abs());
        value[c] = kron[c] * half;
    }
    Ok(PanelEstimate {
        value,
        error,
        abs_mass,
    })
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    depth: u32,
    est: PanelEstimate<N>,
}

/// Integrates a vector-valued integrand over consecutive panels given by
/// `edges` (ascending). Global adaptive scheme: the panel with the largest
/// error estimate is bisected until the summed estimate meets the tolerance
/// (relative to the integral of |f|) or every remaining panel is at roundoff.
pub fn integrate_panels<const N: usize, F>(mut f: F, edges: &[f64], tol: &Tolerance) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let mut out = [0.0; N];
    if edges.len() < 2 || edges[edges.len() - 1] == edges[0] {
        return Ok(out);
    }
    let mut panels = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        panels.push(Panel {
            a: w[0],
            b: w[1],
            depth: 0,
            est: gk21(&mut f, w[0], w[1])?,
        });
    }
    let floor = |p: &Panel<N>| 50.0 * f64::EPSILON * p.est.abs_mass;
    let max_bisections = 64 * tol.max_depth as usize + 4 * panels.len();
    for _ in 0..=max_bisections {
        let scale: f64 = panels.iter().map(|p| p.est.abs_mass).sum();
        let budget = (tol.rel * scale).max(tol.abs);
        let total: f64 = panels
            .iter()
            .map(|p| if p.est.error > floor(p) { p.est.error } else { 0.0 })
            .sum();
        if total <= budget {
            for p in &panels {
                for c in 0..N {
                    out[c] += p.est.value[c];
                }
            }
            return Ok(out);
        }
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.est.error - floor(p) > panels[worst].est.error - floor(&panels[worst]) {
                worst = i;
            }
        }
        let p = &panels[worst];
        if p.depth >= tol.max_depth {
            return Err(Error::NonConvergence {
                a: p.a,
                b: p.b,
                depth: tol.max_depth,
            });
        }
        let (a, b, depth) = (p.a, p.b, p.depth + 1);
        let mid = 0.5 * (a + b);
        let left = Panel { a, b: mid, depth, est: gk21(&mut f, a, mid)? };
        let right = Panel { a: mid, b, depth, est: gk21(&mut f, mid, b)? };
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
    Err(Error::NonConvergence {
        a: edges[0],
        b: edges[edges.len() - 1],
        depth: tol.max_depth,
    })
}

/// Splits `[a, b]` into the fewest equal panels no wider than `max_width`.
pub fn seed_panels(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let n = (((b - a) / max_width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut edges: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    edges.push(b);
    edges
}

/// Scalar convenience wrapper over [`integrate_panels`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, max_panel: f64, tol: &Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let edges = seed_panels(a, b, max_panel);
    let [v] = integrate_panels(|t| Ok([f(t)?]), &edges, tol)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_on_high_degree_polynomials() {
        let v = integrate(|x| Ok(x.powi(19) + 3.0 * x.powi(4)), 0.0, 1.0, 1.0, &Tolerance::default()).unwrap();
        assert!((v - (1.0 / 20.0 + 3.0 / 5.0)).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = integrate(|x| Ok((40.0 * x).sin().powi(2)), 0.0, 3.0, 0.05, &Tolerance::default()).unwrap();
        let exact = 1.5 - (240.0_f64).sin() / 160.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_power_singularity_converges() {
        let v = integrate(|x| Ok(x.powf(0.3)), 0.0, 0.5, 0.5, &Tolerance::default()).unwrap();
        let exact = 0.5_f64.powf(1.3) / 1.3;
        assert!(((v - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn depth_cap_reports_non_convergence() {
        let tol = Tolerance {
            rel: 1e-15,
            abs: 0.0,
            max_depth: 2,
        };
        let r = integrate(|x| Ok(if x < 0.3 { 0.0 } else { 1.0 }), 0.0, 1.0, 1.0, &tol);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn vector_integrand_components() {
        let edges = seed_panels(0.0, 1.0, 0.25);
        let [a, b] = integrate_panels(|x| Ok([x, x * x]), &edges, &Tolerance::default()).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 1.0 / 3.0).abs() < 1e-15);
    }
}
