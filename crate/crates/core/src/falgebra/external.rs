use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::decimal::{format_rational, Decimal};
use super::expr::{eval_function, FunctionExpr};
use crate::error::{Error, Result};

/// Atoms of an external function of U. Ordering (derived) is the canonical
/// order: constant, then the trigonometric term, then powers by exponent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtAtom {
    Const,
    /// (sin U / U)·cos U
    Trig,
    /// U^Δ
    UPow(Decimal),
}

impl ExtAtom {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ExtAtom::Const => 1.0,
            ExtAtom::Trig => u.sin() / u * u.cos(),
            ExtAtom::UPow(d) => u.powf(d.to_f64()),
        }
    }
}

impl fmt::Display for ExtAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtAtom::Const => f.write_str("1"),
            ExtAtom::Trig => f.write_str("(sin U/U)*cos U"),
            ExtAtom::UPow(d) => write!(f, "U^{d}"),
        }
    }
}

/// Canonical exact linear combination of [`ExtAtom`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExternalExpr {
    terms: BTreeMap<ExtAtom, BigRational>,
}

impl ExternalExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(atom: ExtAtom, coeff: BigRational) -> Self {
        let mut e = Self::zero();
        e.add_term(atom, coeff);
        e
    }

    fn add_term(&mut self, atom: ExtAtom, coeff: BigRational) {
        let entry = self.terms.entry(atom.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&atom);
        }
    }

    pub fn add(&self, other: &ExternalExpr) -> ExternalExpr {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> ExternalExpr {
        if k.is_zero() {
            return ExternalExpr::zero();
        }
        ExternalExpr {
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, atom: &ExtAtom) -> BigRational {
        self.terms.get(atom).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &ExtAtom> {
        self.terms.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExtAtom, &BigRational)> {
        self.terms.iter()
    }

    /// True when only the constant atom remains (or nothing).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|a| *a == ExtAtom::Const)
    }

    /// `Some((c, Δ))` when the expression is exactly c·U^Δ.
    pub fn monomial(&self) -> Option<(BigRational, Decimal)> {
        if self.terms.len() != 1 {
            return None;
        }
        match self.terms.iter().next() {
            Some((ExtAtom::UPow(d), c)) => Some((c.clone(), d.clone())),
            _ => None,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c.to_f64().unwrap_or(f64::NAN) * a.eval(u))
            .sum()
    }
}

impl fmt::Display for ExternalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (atom, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mag = c.abs();
            match atom {
                ExtAtom::Const => f.write_str(&format_rational(&mag))?,
                _ if mag.is_one() => write!(f, "{atom}")?,
                _ => write!(f, "{}*{atom}", format_rational(&mag))?,
            }
        }
        Ok(())
    }
}

impl Serialize for ExternalExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            atom: &'a ExtAtom,
            coeff: String,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (atom, c) in &self.terms {
            seq.serialize_element(&Term {
                atom,
                coeff: format_rational(c),
            })?;
        }
        seq.end()
    }
}

/// Closed form of H(U) = (1/U)∫ f over one segment of the atom's convention.
pub fn mean_integral_symbolic(f: &FunctionExpr) -> ExternalExpr {
    let half = BigRational::new(1.into(), 2.into());
    match f {
        FunctionExpr::Sin2 => ExternalExpr::term(ExtAtom::Const, half.clone()).add(&ExternalExpr::term(ExtAtom::Trig, -half)),
        FunctionExpr::Cos2 => ExternalExpr::term(ExtAtom::Const, half.clone()).add(&ExternalExpr::term(ExtAtom::Trig, half)),
        FunctionExpr::Pow(d) => {
            let k = (BigRational::one() + d.rational()).recip();
            ExternalExpr::term(ExtAtom::UPow(d.clone()), k)
        }
        FunctionExpr::Scale(c, inner) => mean_integral_symbolic(inner).scale(c.rational()),
        FunctionExpr::Sum(items) => items
            .iter()
            .fold(ExternalExpr::zero(), |acc, i| acc.add(&mean_integral_symbolic(i))),
    }
}

/// The structural factor F[f(α₀)] = 1/f(α₀).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralFactor {
    function: FunctionExpr,
}

impl StructuralFactor {
    pub fn function(&self) -> &FunctionExpr {
        &self.function
    }

    pub fn eval(&self, alpha0: f64, origin: f64) -> Result<f64> {
        let v = eval_function(&self.function, alpha0, origin)?;
        if v == 0.0 {
            return Err(Error::Degenerate(format!("f(alpha0) = 0 at alpha0 = {alpha0}")));
        }
        Ok(1.0 / v)
    }

    pub fn render_at(&self, arg: &str) -> String {
        let inner = self.function.render_at(arg);
        if self.function.is_sum() || matches!(self.function, FunctionExpr::Scale(..)) {
            format!("1/[{inner}]")
        } else {
            format!("1/{inner}")
        }
    }
}

impl fmt::Display for StructuralFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_at("a0"))
    }
}

pub fn structural_factor(f: &FunctionExpr) -> StructuralFactor {
    StructuralFactor { function: f.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::falgebra::parse_function;

    #[test]
    fn closed_forms() {
        assert_eq!(mean_integral_symbolic(&FunctionExpr::Sin2).to_string(), "1/2 - 1/2*(sin U/U)*cos U");
        assert_eq!(mean_integral_symbolic(&FunctionExpr::Cos2).to_string(), "1/2 + 1/2*(sin U/U)*cos U");
        let f = parse_function("pow(0.4) + pow(0.3)").unwrap();
        assert_eq!(mean_integral_symbolic(&f).to_string(), "10/13*U^0.3 + 5/7*U^0.4");
        let one = parse_function("1*sin2 + 1*cos2").unwrap();
        assert_eq!(mean_integral_symbolic(&one).to_string(), "1");
    }

    #[test]
    fn pow_one_at_half() {
        let e = mean_integral_symbolic(&FunctionExpr::pow("1").unwrap());
        assert!((e.eval(0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn monomial_detection() {
        let e = mean_integral_symbolic(&FunctionExpr::pow("0.7").unwrap());
        let (c, d) = e.monomial().unwrap();
        assert_eq!(format_rational(&c), "10/17");
        assert_eq!(d.to_string(), "0.7");
        assert!(mean_integral_symbolic(&FunctionExpr::Sin2).monomial().is_none());
    }

    #[test]
    fn structural_factor_rendering_and_degeneracy() {
        assert_eq!(structural_factor(&FunctionExpr::Sin2).to_string(), "1/sin^2(a0)");
        assert_eq!(structural_factor(&FunctionExpr::pow("0.5").unwrap()).to_string(), "1/(a0-L)^0.5");
        let f = parse_function("pow(0.4)+pow(0.3)").unwrap();
        assert_eq!(structural_factor(&f).to_string(), "1/[(a0-L)^0.4 + (a0-L)^0.3]");
        let sf = structural_factor(&FunctionExpr::Sin2);
        assert!(matches!(sf.eval(0.0, 0.0), Err(Error::Degenerate(_))));
        assert!((sf.eval(1.0, 0.0).unwrap() - 1.0 / 1f64.sin().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn zero_coefficients_dropped() {
        let a = mean_integral_symbolic(&FunctionExpr::Sin2);
        let b = mean_integral_symbolic(&FunctionExpr::Cos2);
        let s = a.add(&b);
        assert!(s.is_constant());
        assert_eq!(s.atoms().count(), 1);
        assert!(a.add(&a.scale(&BigRational::from_integer((-1).into()))).is_zero());
    }
}
