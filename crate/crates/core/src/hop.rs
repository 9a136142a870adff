//! The mean-value operator Ĥ: reverse-iterated segment chains, mean-value
//! points, and evaluation of the resulting factorization products.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::falgebra::{eval_function, FunctionExpr};
use crate::ladder::{local_zero_spacing, panel_width, Interval, LadderContext};
use crate::quad::{integrate_panels, seed_panels, Tolerance};
use crate::roots::bisect;

/// Squared zeta values below this make a zeta-mode ratio meaningless.
pub const ZETA_DEGENERACY_FLOOR: f64 = 1e-12;

/// Which of `[T, T+U]`, `[L, L+U]`, `[πL, πL+U]` a segment is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OffsetMode {
    T,
    L,
    #[serde(rename = "piL")]
    PiL,
}

impl FromStr for OffsetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(OffsetMode::T),
            "L" => Ok(OffsetMode::L),
            "piL" | "pil" | "PiL" => Ok(OffsetMode::PiL),
            other => Err(Error::Config(format!("unknown offset mode {other:?} (expected T, L or piL)"))),
        }
    }
}

impl fmt::Display for OffsetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OffsetMode::T => "T",
            OffsetMode::L => "L",
            OffsetMode::PiL => "piL",
        })
    }
}

/// A validated segment `[start, start + U]`.
///
/// Admissibility is checked on the segment start (πL in `piL` mode): it
/// must lie on the ladder domain and satisfy `U ≤ start / (10 ln start)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    base: f64,
    u: f64,
    offset_mode: OffsetMode,
    a_cap: Option<f64>,
}

impl SegmentSpec {
    pub fn new(base: f64, u: f64, offset_mode: OffsetMode, a_cap: Option<f64>) -> Result<Self> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::Domain(format!("U must be positive, got {u}")));
        }
        if let Some(a) = a_cap {
            if !(a < 1.0 && a > 0.0) {
                return Err(Error::Domain(format!("a_cap must lie in (0, 1), got {a}")));
            }
            if u > a {
                return Err(Error::Domain(format!("U = {u} exceeds a_cap = {a}")));
            }
        }
        if !base.is_finite() {
            return Err(Error::Domain(format!("base must be finite, got {base}")));
        }
        let seg = SegmentSpec { base, u, offset_mode, a_cap };
        let start = seg.start();
        if !(start >= crate::ladder::LADDER_T_MIN) {
            return Err(Error::Domain(format!(
                "segment start {start} lies below the ladder domain ({})",
                crate::ladder::LADDER_T_MIN
            )));
        }
        let cap = start / (10.0 * start.ln());
        if u > cap {
            return Err(Error::Domain(format!("U = {u} is too large for start {start} (limit {cap:.4})")));
        }
        Ok(seg)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn offset_mode(&self) -> OffsetMode {
        self.offset_mode
    }

    pub fn a_cap(&self) -> Option<f64> {
        self.a_cap
    }

    /// Left end of the segment.
    pub fn start(&self) -> f64 {
        match self.offset_mode {
            OffsetMode::T | OffsetMode::L => self.base,
            OffsetMode::PiL => PI * self.base,
        }
    }

    /// Point subtracted inside power atoms; the segment start.
    pub fn origin(&self) -> f64 {
        self.start()
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.start(),
            hi: self.start() + self.u,
        }
    }
}

/// Output of Ĥ for one order k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationData {
    pub k: usize,
    pub function: FunctionExpr,
    pub segment: SegmentSpec,
    /// α₀ … α_k
    pub alpha: Vec<f64>,
    /// β₁ … β_k
    pub beta: Vec<f64>,
    /// S⁰ … S^k
    pub segments: Vec<Interval>,
    /// A₁ … A_k
    pub stage_a: Vec<f64>,
    /// B₀ … B_k; B₀ = U·H
    pub stage_b: Vec<f64>,
    pub h_value: f64,
    pub f_alpha0: f64,
}

/// Rows of Ĥ for k = 1..k0, each zero-padded to width 2k0 + 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HMatrix {
    pub k0: usize,
    pub rows: Vec<Vec<f64>>,
}

impl HMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), 2 * self.k0 + 1)
    }

    /// Number of meaningful (unpadded) entries in row k (1-based).
    pub fn meaningful(&self, k: usize) -> usize {
        2 * k + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Zeta,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "zeta" => Ok(Mode::Zeta),
            other => Err(Error::Config(format!("unknown mode {other:?} (expected exact or zeta)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Zeta => "zeta",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub lhs_product: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Leftmost t in `seg` with `target_fn(t) = target`.
///
/// Scans on a grid no coarser than an eighth of the local zero spacing (and
/// at least 256 cells), then bisects the first sign change to a width of
/// 1e-10·|seg|. Values within 1e-13 of the target (relative) count as hits,
/// so a constant function yields the left endpoint.
pub fn mean_value_point<F>(seg: Interval, mut target_fn: F, target: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let len = seg.len();
    let step = (local_zero_spacing(seg.lo) / 8.0).min(len / 256.0);
    let n = (len / step).ceil() as usize;
    let hit = 1e-13 * target.abs().max(f64::MIN_POSITIVE);
    let mut g = |t: f64| -> Result<f64> {
        let d = target_fn(t)? - target;
        Ok(if d.abs() <= hit { 0.0 } else { d })
    };
    let mut a = seg.lo;
    let mut ga = g(a)?;
    if ga == 0.0 {
        return Ok(a);
    }
    for i in 1..=n {
        let b = if i == n { seg.hi } else { seg.lo + len * i as f64 / n as f64 };
        let gb = g(b)?;
        if gb == 0.0 {
            return Ok(b);
        }
        if (gb < 0.0) != (ga < 0.0) {
            return bisect(&mut g, a, b, ga, 1e-10 * len);
        }
        a = b;
        ga = gb;
    }
    Err(Error::NotFound {
        target,
        lo: seg.lo,
        hi: seg.hi,
    })
}

// φ₁^r(t) for t ∈ S^r together with φ₁(t); the final value is clamped into
// S⁰ to absorb rounding at the segment ends.
fn forward_chain(ctx: &LadderContext, t: f64, r: usize, s0: &Interval) -> Result<(f64, f64)> {
    let mut x = t;
    let mut first = t;
    for i in 0..r {
        x = ctx.ladder_phi1(x)?;
        if i == 0 {
            first = x;
        }
    }
    Ok((first, x.clamp(s0.lo, s0.hi)))
}

fn stage_integrals(
    ctx: &LadderContext,
    f: &FunctionExpr,
    origin: f64,
    s0: &Interval,
    seg: &Interval,
    r: usize,
) -> Result<(f64, f64)> {
    let edges = seed_panels(seg.lo, seg.hi, panel_width(seg.hi));
    let tol = Tolerance::relative(ctx.quadrature_tol());
    let [a, b] = integrate_panels(
        |t| {
            let (phi, pulled) = forward_chain(ctx, t, r, s0)?;
            let w = eval_function(f, pulled, origin)?;
            let zt = ctx.z_squared(t)? / ctx.v_prime(phi);
            Ok([w * zt, w])
        },
        &edges,
        &tol,
    )?;
    Ok((a, b))
}

/// Builds the k-fold chain S⁰ … S^k and the mean-value points of Ĥ.
pub fn apply_h(f: &FunctionExpr, seg: &SegmentSpec, k: usize, ctx: &LadderContext) -> Result<FactorizationData> {
    if k == 0 {
        return Err(Error::Domain("order k must be at least 1".into()));
    }
    f.validate()?;
    let origin = seg.origin();
    let s0 = seg.interval();

    let mut segments = vec![s0];
    for r in 1..=k {
        let next = ctx.reverse_segment(segments[r - 1])?;
        if !(next.lo > segments[r - 1].lo) {
            return Err(Error::Degenerate(format!("reverse iterate {r} does not move the segment up")));
        }
        segments.push(next);
    }

    let tol = Tolerance::relative(ctx.quadrature_tol());
    let b0 = crate::quad::integrate(|t| eval_function(f, t, origin), s0.lo, s0.hi, panel_width(s0.hi), &tol)?;
    if !(b0 > 0.0) {
        return Err(Error::Degenerate(format!("f integrates to {b0:e} over the base segment")));
    }
    let h_value = b0 / seg.u();

    let mut stage_a = Vec::with_capacity(k);
    let mut stage_b = vec![b0];
    let mut alpha = vec![0.0];
    let mut beta = Vec::with_capacity(k);
    for r in 1..=k {
        let sr = segments[r];
        let (a_r, b_r) = stage_integrals(ctx, f, origin, &s0, &sr, r)?;
        if !(a_r > 0.0 && b_r > 0.0) {
            return Err(Error::Degenerate(format!("stage {r} integrals A = {a_r:e}, B = {b_r:e}")));
        }
        alpha.push(mean_value_point(sr, |t| ctx.z_tilde_sq(t), a_r / b_r)?);
        beta.push(mean_value_point(sr, |t| ctx.z_tilde_sq(t), segments[r - 1].len() / sr.len())?);
        stage_a.push(a_r);
        stage_b.push(b_r);
    }

    let level = stage_b[k] / segments[k].len();
    alpha[0] = mean_value_point(s0, |t| eval_function(f, t, origin), level)?;
    let f_alpha0 = eval_function(f, alpha[0], origin)?;

    Ok(FactorizationData {
        k,
        function: f.clone(),
        segment: *seg,
        alpha,
        beta,
        segments,
        stage_a,
        stage_b,
        h_value,
        f_alpha0,
    })
}

/// Ĥ in matrix form: row k is the vector of [`apply_h`] at order k.
pub fn h_matrix(f: &FunctionExpr, seg: &SegmentSpec, k0: usize, ctx: &LadderContext) -> Result<HMatrix> {
    if k0 == 0 {
        return Err(Error::Domain("k0 must be at least 1".into()));
    }
    let width = 2 * k0 + 1;
    let rows: Vec<Result<Vec<f64>>> = (1..=k0)
        .into_par_iter()
        .map(|k| {
            let data = apply_h(f, seg, k, ctx)?;
            let mut row = data.alpha.clone();
            row.extend_from_slice(&data.beta);
            row.resize(width, 0.0);
            Ok(row)
        })
        .collect();
    Ok(HMatrix {
        k0,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// The product ∏ Z̃²(α_r)/Z̃²(β_r) (exact) or ∏ Z²(α_r)/Z²(β_r) (zeta).
pub fn chain_product(data: &FactorizationData, mode: Mode, ctx: &LadderContext) -> Result<f64> {
    let mut product = 1.0;
    for (a, b) in data.alpha[1..].iter().zip(&data.beta) {
        let (num, den) = match mode {
            Mode::Exact => (ctx.z_tilde_sq(*a)?, ctx.z_tilde_sq(*b)?),
            Mode::Zeta => {
                let den = ctx.z_squared(*b)?;
                if den < ZETA_DEGENERACY_FLOOR {
                    return Err(Error::Degenerate(format!("|zeta(1/2 + i beta)|^2 = {den:e} at beta = {b}")));
                }
                (ctx.z_squared(*a)?, den)
            }
        };
        product *= num / den;
    }
    Ok(product)
}

/// Compares the chain product against H/f(α₀); residual = |lhs/rhs − 1|.
pub fn factorization_eval(data: &FactorizationData, mode: Mode, ctx: &LadderContext) -> Result<EvalReport> {
    if data.f_alpha0 == 0.0 {
        return Err(Error::Degenerate(format!("f(alpha0) = 0 at alpha0 = {}", data.alpha[0])));
    }
    let lhs_product = chain_product(data, mode, ctx)?;
    let rhs = data.h_value / data.f_alpha0;
    Ok(EvalReport {
        lhs_product,
        rhs,
        residual: (lhs_product / rhs - 1.0).abs(),
    })
}
