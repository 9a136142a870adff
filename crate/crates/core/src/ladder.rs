//! The Hardy–Littlewood integral J(T) = ∫₀ᵀ Z²(t) dt and the operational
//! ladder φ₁ = V⁻¹∘J with V(x) = x ln x + (c − ln 2π)x + c₀.
//!
//! J is assembled from a checkpoint grid (spacing 100) plus per-block panel
//! prefix sums. Panel edges depend only on the block index, so a value of J
//! is the same whether the grid was computed in this process or loaded from
//! a cache file.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::roots::solve_increasing;
use crate::zcore::{hardy_z_from_zero, EvalAccuracy};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const CHECKPOINT_SPACING: f64 = 100.0;
pub const CACHE_FORMAT_VERSION: u32 = 1;
pub const LADDER_T_MIN: f64 = 100.0;

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("empty or invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// Mean spacing of critical-line zeros near height t, 2π/ln(t/2π); clamped
/// to 2π where the logarithm drops below one.
pub fn local_zero_spacing(t: f64) -> f64 {
    let l = (t / (2.0 * PI)).ln();
    if l > 1.0 {
        2.0 * PI / l
    } else {
        2.0 * PI
    }
}

/// Widest panel allowed near height t: a quarter of the zero spacing, at most ½.
pub fn panel_width(t: f64) -> f64 {
    (0.25 * local_zero_spacing(t)).min(0.5)
}

#[derive(Default)]
struct CheckpointState {
    // values[i] = J(i · CHECKPOINT_SPACING)
    values: Vec<f64>,
    // per-block prefix sums over the block's panels
    blocks: HashMap<usize, Arc<Vec<f64>>>,
}

pub struct LadderContext {
    euler_c: f64,
    c0_offset: f64,
    quadrature_tol: f64,
    t_min: f64,
    accuracy: EvalAccuracy,
    state: RwLock<CheckpointState>,
}

impl std::fmt::Debug for LadderContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LadderContext")
            .field("euler_c", &self.euler_c)
            .field("c0_offset", &self.c0_offset)
            .field("quadrature_tol", &self.quadrature_tol)
            .field("checkpoints", &self.checkpoint_count())
            .finish()
    }
}

impl Default for LadderContext {
    fn default() -> Self {
        LadderContext::new(1e-8).expect("default tolerance is valid")
    }
}

impl LadderContext {
    pub fn new(quadrature_tol: f64) -> Result<Self> {
        if !(quadrature_tol > 0.0) {
            return Err(Error::Domain(format!("quadrature_tol must be positive, got {quadrature_tol}")));
        }
        Ok(LadderContext {
            euler_c: EULER_GAMMA,
            c0_offset: 0.0,
            quadrature_tol,
            t_min: LADDER_T_MIN,
            accuracy: EvalAccuracy::default(),
            state: RwLock::new(CheckpointState {
                values: vec![0.0],
                blocks: HashMap::new(),
            }),
        })
    }

    pub fn euler_c(&self) -> f64 {
        self.euler_c
    }

    pub fn c0_offset(&self) -> f64 {
        self.c0_offset
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn accuracy(&self) -> &EvalAccuracy {
        &self.accuracy
    }

    fn panel_tolerance(&self) -> Tolerance {
        // Z carries ~1e-10 relative phase-rounding noise at t ~ 1e5, which caps
        // how tight a per-panel tolerance can usefully be
        Tolerance::relative(self.quadrature_tol)
    }

    /// Z(t)² at the context's accuracy; accepts t ≥ 0.
    pub fn z_squared(&self, t: f64) -> Result<f64> {
        let z = hardy_z_from_zero(t, &self.accuracy)?;
        Ok(z * z)
    }

    fn panel_integral(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let [v] = quad::integrate_panels(|t| Ok([self.z_squared(t)?]), &[a, b], &self.panel_tolerance())?;
        Ok(v)
    }

    // (start, panel width, panel count) of block i
    fn block_layout(i: usize) -> (f64, f64, usize) {
        let start = i as f64 * CHECKPOINT_SPACING;
        let n = (CHECKPOINT_SPACING / panel_width(start + CHECKPOINT_SPACING)).ceil() as usize;
        (start, CHECKPOINT_SPACING / n as f64, n)
    }

    fn panel_edge(i: usize, j: usize) -> f64 {
        let (start, h, n) = Self::block_layout(i);
        if j >= n {
            start + CHECKPOINT_SPACING
        } else {
            start + h * j as f64
        }
    }

    fn compute_block(&self, i: usize) -> Result<Vec<f64>> {
        let (_, _, n) = Self::block_layout(i);
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for j in 0..n {
            acc += self.panel_integral(Self::panel_edge(i, j), Self::panel_edge(i, j + 1))?;
            prefix.push(acc);
        }
        Ok(prefix)
    }

    fn block(&self, i: usize) -> Result<Arc<Vec<f64>>> {
        if let Some(b) = self.state.read().expect("ladder cache poisoned").blocks.get(&i) {
            return Ok(Arc::clone(b));
        }
        let b = Arc::new(self.compute_block(i)?);
        let mut st = self.state.write().expect("ladder cache poisoned");
        Ok(Arc::clone(st.blocks.entry(i).or_insert(b)))
    }

    /// Extends the checkpoint grid so that J(i · spacing) is known.
    ///
    /// Missing blocks are computed with no lock held (a rayon worker that
    /// waits on a lock it already holds would deadlock); blocks depend only
    /// on their index, so a concurrent duplicate computation is harmless.
    fn ensure_checkpoint(&self, i: usize) -> Result<f64> {
        let missing: Vec<usize> = {
            let st = self.state.read().expect("ladder cache poisoned");
            if let Some(&v) = st.values.get(i) {
                return Ok(v);
            }
            (st.values.len() - 1..i).filter(|b| !st.blocks.contains_key(b)).collect()
        };
        let computed: Vec<(usize, Vec<f64>)> = missing
            .into_par_iter()
            .map(|b| self.compute_block(b).map(|v| (b, v)))
            .collect::<Result<_>>()?;
        let mut st = self.state.write().expect("ladder cache poisoned");
        for (b, v) in computed {
            st.blocks.entry(b).or_insert_with(|| Arc::new(v));
        }
        while st.values.len() <= i {
            let b = st.values.len() - 1;
            let total = match st.blocks.get(&b) {
                Some(block) => *block.last().expect("non-empty block"),
                None => {
                    // another caller extended the grid between our read and write
                    drop(st);
                    return self.ensure_checkpoint(i);
                }
            };
            let next = st.values[b] + total;
            st.values.push(next);
        }
        Ok(st.values[i])
    }

    /// J(T) = ∫₀ᵀ Z²(t) dt.
    pub fn hl_integral(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("J(T) requires finite T >= 0, got {t}")));
        }
        let i = (t / CHECKPOINT_SPACING).floor() as usize;
        let base = self.ensure_checkpoint(i)?;
        let (start, h, n) = Self::block_layout(i);
        let j = (((t - start) / h).floor() as usize).min(n - 1);
        // guard against rounding putting t just left of its panel edge
        let j = if t < Self::panel_edge(i, j) { j - 1 } else { j };
        let prefix = self.block(i)?;
        Ok(base + prefix[j] + self.panel_integral(Self::panel_edge(i, j), t)?)
    }

    /// V(x) = x ln x + (c − ln 2π)x + c₀.
    pub fn v(&self, x: f64) -> f64 {
        x * x.ln() + (self.euler_c - (2.0 * PI).ln()) * x + self.c0_offset
    }

    /// V'(x) = ln x + 1 + c − ln 2π.
    pub fn v_prime(&self, x: f64) -> f64 {
        x.ln() + 1.0 + self.euler_c - (2.0 * PI).ln()
    }

    fn v_inverse(&self, y: f64, upper: f64) -> Result<f64> {
        let lo = 2.0;
        if self.v(upper) < y {
            return Err(Error::BracketFailure { target: y, lo, hi: upper });
        }
        solve_increasing(|x| Ok((self.v(x), self.v_prime(x))), lo, upper, y, upper, 4.0 * f64::EPSILON * upper)
    }

    fn check_domain(&self, t: f64, what: &str) -> Result<()> {
        if !(t >= self.t_min) || !t.is_finite() {
            return Err(Error::Domain(format!("{what} requires t >= {}, got {t}", self.t_min)));
        }
        Ok(())
    }

    /// φ₁(T): the x with V(x) = J(T). Always below T on the ladder domain.
    pub fn ladder_phi1(&self, t: f64) -> Result<f64> {
        self.check_domain(t, "phi1")?;
        self.phi1_unchecked(t)
    }

    pub(crate) fn phi1_unchecked(&self, t: f64) -> Result<f64> {
        let j = self.hl_integral(t)?;
        let x = self.v_inverse(j, t)?;
        let residual = (self.v(x) - j).abs();
        if residual > self.quadrature_tol * j {
            return Err(Error::Domain(format!("V^-1 residual {residual:e} at T = {t}")));
        }
        Ok(x)
    }

    /// φ₁⁻¹(x): the T > x with φ₁(T) = x, searched inside (x, 2x).
    pub fn phi1_inverse(&self, x: f64) -> Result<f64> {
        self.check_domain(x, "phi1_inverse")?;
        let target = self.v(x);
        // T − φ₁(T) ≈ (1 − c)T / (ln(T/2π) + 1)
        let gap = (1.0 - self.euler_c) * x / ((x / (2.0 * PI)).ln() + 1.0);
        let mut hi = (x + 1.5 * gap + 50.0).min(2.0 * x);
        loop {
            if self.hl_integral(hi)? >= target {
                break;
            }
            if hi >= 2.0 * x {
                return Err(Error::BracketFailure { target, lo: x, hi: 2.0 * x });
            }
            hi = (hi + gap).min(2.0 * x);
        }
        solve_increasing(
            |t| Ok((self.hl_integral(t)?, self.z_squared(t)?)),
            x,
            hi,
            target,
            x + gap,
            4.0 * f64::EPSILON * hi,
        )
    }

    /// Z̃²(t) = Z²(t)/V'(φ₁(t)) = dφ₁/dt.
    pub fn z_tilde_sq(&self, t: f64) -> Result<f64> {
        self.check_domain(t, "z_tilde_sq")?;
        let phi = self.phi1_unchecked(t)?;
        self.z_tilde_sq_given_phi(t, phi)
    }

    pub(crate) fn z_tilde_sq_given_phi(&self, t: f64, phi: f64) -> Result<f64> {
        Ok(self.z_squared(t)? / self.v_prime(phi))
    }

    /// [A, B] ↦ [φ₁⁻¹(A), φ₁⁻¹(B)].
    pub fn reverse_segment(&self, seg: Interval) -> Result<Interval> {
        let lo = self.phi1_inverse(seg.lo)?;
        let hi = self.phi1_inverse(seg.hi)?;
        Interval::new(lo, hi)
    }

    /// [A, B] ↦ [φ₁(A), φ₁(B)].
    pub fn push_forward(&self, seg: Interval) -> Result<Interval> {
        Interval::new(self.ladder_phi1(seg.lo)?, self.ladder_phi1(seg.hi)?)
    }

    pub fn checkpoint_count(&self) -> usize {
        self.state.read().expect("ladder cache poisoned").values.len()
    }

    /// Checkpoint grid as ascending (t, J(t)) pairs.
    pub fn checkpoints(&self) -> Vec<(f64, f64)> {
        let st = self.state.read().expect("ladder cache poisoned");
        st.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64 * CHECKPOINT_SPACING, v))
            .collect()
    }

    /// Writes the checkpoint grid: a versioned `key=value` header followed by
    /// a `t,J` CSV body. Values use shortest round-trip formatting.
    pub fn save_checkpoints(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "format_version={CACHE_FORMAT_VERSION}");
        let _ = writeln!(out, "quadrature_tol={:?}", self.quadrature_tol);
        let _ = writeln!(out, "c={:?}", self.euler_c);
        let _ = writeln!(out, "c0={:?}", self.c0_offset);
        out.push_str("t,J\n");
        for (t, j) in self.checkpoints() {
            let _ = writeln!(out, "{t:?},{j:?}");
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Loads a checkpoint grid written by [`save_checkpoints`]. Rejects files
    /// whose tolerance or constants differ from this context. Returns the
    /// number of checkpoints now held.
    pub fn load_checkpoints(&self, path: &Path) -> Result<usize> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let mut header = HashMap::new();
        for _ in 0..4 {
            let line = lines.next().ok_or_else(|| Error::Cache("truncated header".into()))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Cache(format!("malformed header line {line:?}")))?;
            header.insert(k.trim().to_string(), v.trim().to_string());
        }
        let field = |k: &str| -> Result<f64> {
            header
                .get(k)
                .ok_or_else(|| Error::Cache(format!("missing header field {k}")))?
                .parse::<f64>()
                .map_err(|e| Error::Cache(format!("bad {k}: {e}")))
        };
        if field("format_version")? != CACHE_FORMAT_VERSION as f64 {
            return Err(Error::Cache(format!("unsupported format_version {}", header["format_version"])));
        }
        for (name, expected) in [
            ("quadrature_tol", self.quadrature_tol),
            ("c", self.euler_c),
            ("c0", self.c0_offset),
        ] {
            let got = field(name)?;
            if got != expected {
                return Err(Error::Cache(format!("{name} mismatch: file has {got:?}, context uses {expected:?}")));
            }
        }
        if lines.next().map(str::trim) != Some("t,J") {
            return Err(Error::Cache("missing t,J column header".into()));
        }
        let mut values = Vec::new();
        for (i, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let (t, j) = line
                .split_once(',')
                .ok_or_else(|| Error::Cache(format!("malformed row {line:?}")))?;
            let t: f64 = t.trim().parse().map_err(|e| Error::Cache(format!("bad t in {line:?}: {e}")))?;
            let j: f64 = j.trim().parse().map_err(|e| Error::Cache(format!("bad J in {line:?}: {e}")))?;
            if t != i as f64 * CHECKPOINT_SPACING {
                return Err(Error::Cache(format!("row {i}: expected t = {}, got {t}", i as f64 * CHECKPOINT_SPACING)));
            }
            if let Some(&prev) = values.last() {
                if j < prev {
                    return Err(Error::Cache(format!("J decreases at t = {t}")));
                }
            } else if j != 0.0 {
                return Err(Error::Cache("J(0) must be 0".into()));
            }
            values.push(j);
        }
        if values.is_empty() {
            return Err(Error::Cache("no checkpoints".into()));
        }
        let mut st = self.state.write().expect("ladder cache poisoned");
        if values.len() > st.values.len() {
            st.values = values;
        }
        Ok(st.values.len())
    }
}
