//! Relation AST for hybrid formulas.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::falgebra::{format_rational, FunctionExpr};

/// Numeric values bound to one formula id.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValues {
    pub k: usize,
    /// the chain product ∏ ratio over r = 1..k
    pub product: f64,
    /// f(α₀)
    pub f_alpha0: f64,
}

/// Leaves are product symbols, α₀-values and exact constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    /// ∏_{r=1}^{k} |ζ(½+iα_r^{m,k})/ζ(½+iβ_r^{k})|²
    Product { m: usize, k: usize },
    /// f_m(α₀^{m,k_m})
    Value { m: usize, function: FunctionExpr },
    Const { value: String },
    Sum { terms: Vec<Relation> },
    Mul { factors: Vec<Relation> },
    Recip { of: Box<Relation> },
    Quotient { num: Box<Relation>, den: Box<Relation> },
}

impl Relation {
    pub fn constant(q: &BigRational) -> Relation {
        Relation::Const { value: format_rational(q) }
    }

    /// Multiplies by `q`, leaving the relation untouched when q = 1.
    pub fn scaled(self, q: &BigRational) -> Relation {
        if q.is_one() {
            return self;
        }
        match self {
            Relation::Mul { mut factors } => {
                factors.insert(0, Relation::constant(q));
                Relation::Mul { factors }
            }
            other => Relation::Mul {
                factors: vec![Relation::constant(q), other],
            },
        }
    }

    /// Formula ids referenced by product symbols, with their orders.
    pub fn product_orders(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |r| {
            if let Relation::Product { m, k } = r {
                out.insert(*m, *k);
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Relation)) {
        f(self);
        match self {
            Relation::Sum { terms } => terms.iter().for_each(|t| t.visit(f)),
            Relation::Mul { factors } => factors.iter().for_each(|t| t.visit(f)),
            Relation::Recip { of } => of.visit(f),
            Relation::Quotient { num, den } => {
                num.visit(f);
                den.visit(f);
            }
            _ => {}
        }
    }

    /// Replaces the order of every product symbol of formula m.
    pub fn with_orders(&self, orders: &BTreeMap<usize, usize>) -> Relation {
        match self {
            Relation::Product { m, k } => Relation::Product {
                m: *m,
                k: orders.get(m).copied().unwrap_or(*k),
            },
            Relation::Sum { terms } => Relation::Sum {
                terms: terms.iter().map(|t| t.with_orders(orders)).collect(),
            },
            Relation::Mul { factors } => Relation::Mul {
                factors: factors.iter().map(|t| t.with_orders(orders)).collect(),
            },
            Relation::Recip { of } => Relation::Recip {
                of: Box::new(of.with_orders(orders)),
            },
            Relation::Quotient { num, den } => Relation::Quotient {
                num: Box::new(num.with_orders(orders)),
                den: Box::new(den.with_orders(orders)),
            },
            other => other.clone(),
        }
    }

    pub fn eval(&self, values: &BTreeMap<usize, BoundValues>) -> Result<f64> {
        let lookup = |m: usize| values.get(&m).ok_or(Error::MissingBinding(m));
        Ok(match self {
            Relation::Product { m, k } => {
                let b = lookup(*m)?;
                if b.k != *k {
                    return Err(Error::Validation(format!("formula {m} is bound at order {} but the relation uses {k}", b.k)));
                }
                b.product
            }
            Relation::Value { m, .. } => lookup(*m)?.f_alpha0,
            Relation::Const { value } => parse_rational(value)?.to_f64().unwrap_or(f64::NAN),
            Relation::Sum { terms } => terms.iter().map(|t| t.eval(values)).sum::<Result<f64>>()?,
            Relation::Mul { factors } => factors.iter().map(|t| t.eval(values)).product::<Result<f64>>()?,
            Relation::Recip { of } => {
                let v = of.eval(values)?;
                if v == 0.0 {
                    return Err(Error::Degenerate("reciprocal of zero in hybrid relation".into()));
                }
                1.0 / v
            }
            Relation::Quotient { num, den } => {
                let d = den.eval(values)?;
                if d == 0.0 {
                    return Err(Error::Degenerate("zero denominator in hybrid relation".into()));
                }
                num.eval(values)? / d
            }
        })
    }

    // sums (including a summed function value) and quotients need grouping
    // when they appear as a factor
    fn is_compound(&self) -> bool {
        match self {
            Relation::Sum { .. } | Relation::Quotient { .. } => true,
            Relation::Value { function, .. } => function.is_sum() || matches!(function, FunctionExpr::Scale(..)),
            _ => false,
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Validation(format!("malformed rational constant {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => Ok(BigRational::new(n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)),
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Product { m, k } => write!(f, "P{m}[k={k}]"),
            Relation::Value { m, function } => f.write_str(&function.render_at(&format!("a0^{m}"))),
            Relation::Const { value } => f.write_str(value),
            Relation::Sum { terms } => {
                let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                f.write_str(&parts.join(" + "))
            }
            Relation::Mul { factors } => {
                let parts: Vec<String> = factors
                    .iter()
                    .map(|t| if t.is_compound() { format!("({t})") } else { t.to_string() })
                    .collect();
                f.write_str(&parts.join(" * "))
            }
            Relation::Recip { of } => {
                if of.is_compound() || matches!(**of, Relation::Mul { .. }) {
                    write!(f, "1/[{of}]")
                } else {
                    write!(f, "1/{of}")
                }
            }
            Relation::Quotient { num, den } => write!(f, "{num} / [{den}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bound(k: usize, product: f64, f_alpha0: f64) -> BoundValues {
        BoundValues { k, product, f_alpha0 }
    }

    #[test]
    fn eval_and_render() {
        let rel = Relation::Sum {
            terms: vec![
                Relation::Mul {
                    factors: vec![Relation::Value { m: 1, function: FunctionExpr::Sin2 }, Relation::Product { m: 1, k: 2 }],
                },
                Relation::Product { m: 2, k: 1 }.scaled(&BigRational::new(3.into(), 4.into())),
            ],
        };
        assert_eq!(rel.to_string(), "sin^2(a0^1) * P1[k=2] + 3/4 * P2[k=1]");
        let mut values = BTreeMap::new();
        values.insert(1, bound(2, 2.0, 0.25));
        values.insert(2, bound(1, 4.0, 9.0));
        assert_eq!(rel.eval(&values).unwrap(), 0.5 + 3.0);
        values.remove(&2);
        assert!(matches!(rel.eval(&values), Err(Error::MissingBinding(2))));
    }

    #[test]
    fn order_mismatch_is_rejected() {
        let rel = Relation::Product { m: 1, k: 2 };
        let mut values = BTreeMap::new();
        values.insert(1, bound(3, 1.0, 1.0));
        assert!(matches!(rel.eval(&values), Err(Error::Validation(_))));
        let rebound = rel.with_orders(&[(1, 3)].into_iter().collect());
        assert_eq!(rebound.eval(&values).unwrap(), 1.0);
    }

    #[test]
    fn constants_round_trip() {
        assert_eq!(parse_rational("91/85").unwrap(), BigRational::new(91.into(), 85.into()));
        assert_eq!(parse_rational("2").unwrap(), BigRational::from_integer(2.into()));
        assert!(parse_rational("x/2").is_err());
    }
}
