//! Run configuration: a TOML or JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::falgebra::{parse_function, Convention, FunctionExpr};
use crate::hop::{OffsetMode, SegmentSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Exact,
    Zeta,
    #[default]
    Both,
}

impl std::str::FromStr for ModeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ModeSelection::Exact),
            "zeta" => Ok(ModeSelection::Zeta),
            "both" => Ok(ModeSelection::Both),
            other => Err(Error::Config(format!("unknown mode {other:?} (expected exact, zeta or both)"))),
        }
    }
}

impl ModeSelection {
    pub fn exact(self) -> bool {
        matches!(self, ModeSelection::Exact | ModeSelection::Both)
    }

    pub fn zeta(self) -> bool {
        matches!(self, ModeSelection::Zeta | ModeSelection::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// DSL texts, one per function
    pub family: Vec<String>,
    /// base values L (or T); segment start is πL in `piL` mode
    pub grid: Vec<f64>,
    pub u: f64,
    /// defaults to piL for trigonometric families and L for power families
    pub offset: Option<OffsetMode>,
    pub a_cap: Option<f64>,
    /// k_m per function; a single value applies to all
    pub orders: Vec<usize>,
    /// order cap; defaults to the largest k_m
    pub k0: Option<usize>,
    pub mode: ModeSelection,
    pub quadrature_tol: f64,
    /// pass threshold for exact-mode residuals
    pub exact_tol: f64,
    /// zeta-mode residuals must stay below band_constant·lnln T / ln T
    pub band_constant: f64,
    pub cache: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: Vec::new(),
            grid: Vec::new(),
            u: 1.0,
            offset: None,
            a_cap: None,
            orders: vec![1],
            k0: None,
            mode: ModeSelection::Both,
            quadrature_tol: 1e-8,
            exact_tol: 1e-5,
            band_constant: 5.0,
            cache: None,
            report: None,
        }
    }
}

/// Command-line values that replace file settings when present.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub family: Option<Vec<String>>,
    pub grid: Option<Vec<f64>>,
    pub u: Option<f64>,
    pub offset: Option<OffsetMode>,
    pub orders: Option<Vec<usize>>,
    pub k0: Option<usize>,
    pub mode: Option<ModeSelection>,
    pub quadrature_tol: Option<f64>,
    pub cache: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Ok(serde_json::from_str(&text)?)
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn apply(mut self, o: Overrides) -> RunConfig {
        if let Some(v) = o.family {
            self.family = v;
        }
        if let Some(v) = o.grid {
            self.grid = v;
        }
        if let Some(v) = o.u {
            self.u = v;
        }
        if o.offset.is_some() {
            self.offset = o.offset;
        }
        if let Some(v) = o.orders {
            self.orders = v;
        }
        if o.k0.is_some() {
            self.k0 = o.k0;
        }
        if let Some(v) = o.mode {
            self.mode = v;
        }
        if let Some(v) = o.quadrature_tol {
            self.quadrature_tol = v;
        }
        if o.cache.is_some() {
            self.cache = o.cache;
        }
        if o.report.is_some() {
            self.report = o.report;
        }
        self
    }

    pub fn functions(&self) -> Result<Vec<FunctionExpr>> {
        if self.family.is_empty() {
            return Err(Error::Config("no functions given (use --f)".into()));
        }
        self.family.iter().map(|s| parse_function(s)).collect()
    }

    /// Offset mode, inferred from the family when not set.
    pub fn offset_mode(&self) -> Result<OffsetMode> {
        if let Some(m) = self.offset {
            return Ok(m);
        }
        let trig = self.functions()?.iter().any(|f| f.convention() == Convention::Trig);
        Ok(if trig { OffsetMode::PiL } else { OffsetMode::L })
    }

    /// k_m for each function, broadcasting a single value.
    pub fn resolved_orders(&self) -> Result<Vec<usize>> {
        let n = self.family.len();
        let orders = match self.orders.as_slice() {
            [k] => vec![*k; n],
            ks if ks.len() == n => ks.to_vec(),
            ks => {
                return Err(Error::Config(format!("{} orders given for {n} functions", ks.len())));
            }
        };
        let k0 = self.k0_value();
        if let Some(bad) = orders.iter().find(|&&k| k == 0 || k > k0) {
            return Err(Error::Config(format!("order {bad} outside 1..={k0}")));
        }
        Ok(orders)
    }

    pub fn k0_value(&self) -> usize {
        self.k0.unwrap_or_else(|| self.orders.iter().copied().max().unwrap_or(1))
    }

    pub fn segments(&self) -> Result<Vec<SegmentSpec>> {
        if self.grid.is_empty() {
            return Err(Error::Config("no base values given (use --L)".into()));
        }
        let mode = self.offset_mode()?;
        self.grid
            .iter()
            .map(|&b| SegmentSpec::new(b, self.u, mode, self.a_cap))
            .collect()
    }

    /// Checks every invariant that does not need numerical work.
    pub fn validate(&self) -> Result<()> {
        self.functions()?;
        self.resolved_orders()?;
        self.segments()?;
        if !(self.quadrature_tol > 0.0) || !(self.exact_tol > 0.0) || !(self.band_constant > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Residual band for zeta mode at segment start T.
pub fn zeta_band(band_constant: f64, t: f64) -> f64 {
    band_constant * t.ln().ln() / t.ln()
}
