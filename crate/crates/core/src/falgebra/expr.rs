use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::decimal::Decimal;
use super::parse::parse_function;
use crate::error::{Error, Result};

/// Which segment family an expression lives on: trigonometric atoms on
/// [πL, πL+U], power atoms on [L, L+U].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Trig,
    Power,
}

/// A nonnegative function from the supported families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionExpr {
    Sin2,
    Cos2,
    /// (t − L)^Δ
    Pow(Decimal),
    Scale(Decimal, Box<FunctionExpr>),
    Sum(Vec<FunctionExpr>),
}

impl FunctionExpr {
    pub fn pow(delta: &str) -> Result<Self> {
        let d: Decimal = delta.parse().map_err(Error::Validation)?;
        let f = FunctionExpr::Pow(d);
        f.validate()?;
        Ok(f)
    }

    fn atoms<'a>(&'a self, out: &mut Vec<&'a FunctionExpr>) {
        match self {
            FunctionExpr::Scale(_, inner) => inner.atoms(out),
            FunctionExpr::Sum(items) => items.iter().for_each(|i| i.atoms(out)),
            atom => out.push(atom),
        }
    }

    /// Checks positivity of exponents, pairwise-distinct exponents inside a
    /// sum, a single segment convention, and that f is not identically zero.
    pub fn validate(&self) -> Result<()> {
        let mut atoms = Vec::new();
        self.atoms(&mut atoms);
        let mut exponents: Vec<&Decimal> = Vec::new();
        for a in &atoms {
            if let FunctionExpr::Pow(d) = a {
                if !d.is_positive() {
                    return Err(Error::Validation(format!("exponent must be positive, got {d}")));
                }
                if exponents.contains(&d) {
                    return Err(Error::Validation(format!("exponent {d} repeated within a sum")));
                }
                exponents.push(d);
            }
        }
        let trig = atoms.iter().any(|a| matches!(a, FunctionExpr::Sin2 | FunctionExpr::Cos2));
        if trig && !exponents.is_empty() {
            return Err(Error::Validation(
                "trigonometric and power atoms live on different segment conventions".into(),
            ));
        }
        if self.is_identically_zero() {
            return Err(Error::Validation("function is identically zero".into()));
        }
        Ok(())
    }

    fn is_identically_zero(&self) -> bool {
        match self {
            FunctionExpr::Scale(c, inner) => c.is_zero() || inner.is_identically_zero(),
            FunctionExpr::Sum(items) => items.iter().all(|i| i.is_identically_zero()),
            _ => false,
        }
    }

    pub fn convention(&self) -> Convention {
        let mut atoms = Vec::new();
        self.atoms(&mut atoms);
        if atoms.iter().any(|a| matches!(a, FunctionExpr::Pow(_))) {
            Convention::Power
        } else {
            Convention::Trig
        }
    }

    /// Renders the function applied to a symbolic argument, e.g.
    /// `sin^2(a0[1])` or `(a0[2]-L)^0.4`.
    pub fn render_at(&self, arg: &str) -> String {
        match self {
            FunctionExpr::Sin2 => format!("sin^2({arg})"),
            FunctionExpr::Cos2 => format!("cos^2({arg})"),
            FunctionExpr::Pow(d) => format!("({arg}-L)^{d}"),
            FunctionExpr::Scale(c, inner) => format!("{c}*{}", inner.render_at(arg)),
            FunctionExpr::Sum(items) => items.iter().map(|i| i.render_at(arg)).collect::<Vec<_>>().join(" + "),
        }
    }

    pub fn is_sum(&self) -> bool {
        matches!(self, FunctionExpr::Sum(items) if items.len() > 1)
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionExpr::Sin2 => f.write_str("sin2"),
            FunctionExpr::Cos2 => f.write_str("cos2"),
            FunctionExpr::Pow(d) => write!(f, "pow({d})"),
            FunctionExpr::Scale(c, inner) => write!(f, "{c}*{inner}"),
            FunctionExpr::Sum(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{item}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FunctionExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_function(s)
    }
}

impl Serialize for FunctionExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Pointwise value f(t); power atoms are measured from `origin` (the L of
/// the segment) and require t ≥ origin.
pub fn eval_function(f: &FunctionExpr, t: f64, origin: f64) -> Result<f64> {
    Ok(match f {
        FunctionExpr::Sin2 => t.sin().powi(2),
        FunctionExpr::Cos2 => t.cos().powi(2),
        FunctionExpr::Pow(d) => {
            if t < origin {
                return Err(Error::Domain(format!("(t-L)^{d} undefined for t = {t} < L = {origin}")));
            }
            (t - origin).powf(d.to_f64())
        }
        FunctionExpr::Scale(c, inner) => c.to_f64() * eval_function(inner, t, origin)?,
        FunctionExpr::Sum(items) => {
            let mut s = 0.0;
            for i in items {
                s += eval_function(i, t, origin)?;
            }
            s
        }
    })
}
