use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact decimal literal such as `0.4` or `2`, held as a rational so that
/// exponent sums like 0.4 + 0.3 = 0.7 are exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(BigRational);

impl Decimal {
    pub fn from_rational(q: BigRational) -> Option<Self> {
        // only denominators of the form 2^a 5^b have a finite decimal expansion
        let mut d = q.denom().clone();
        for p in [2u32, 5] {
            let p = BigInt::from(p);
            while (&d % &p).is_zero() {
                d /= &p;
            }
        }
        if d.is_one() {
            Some(Decimal(q))
        } else {
            None
        }
    }

    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let digits_ok = |x: &str| x.bytes().all(|b| b.is_ascii_digit());
        if int.is_empty() || !digits_ok(int) || !digits_ok(frac) || (s.contains('.') && frac.is_empty()) {
            return Err(format!("not a decimal literal: {s:?}"));
        }
        let num: BigInt = format!("{int}{frac}").parse().map_err(|e| format!("{e}"))?;
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        Ok(Decimal(BigRational::new(num, den)))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.0;
        if q.is_integer() {
            return write!(f, "{}", q.numer());
        }
        let mut places = 0usize;
        let mut scaled = q.clone();
        while !scaled.is_integer() {
            scaled *= BigRational::from_integer(BigInt::from(10u32));
            places += 1;
        }
        let digits = scaled.numer().abs().to_string();
        let digits = format!("{digits:0>width$}", width = places + 1);
        let (int, frac) = digits.split_at(digits.len() - places);
        let sign = if q.is_negative() { "-" } else { "" };
        write!(f, "{sign}{int}.{frac}")
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for (s, out) in [("0.4", "0.4"), ("0.40", "0.4"), ("2", "2"), ("2.50", "2.5"), ("0.05", "0.05"), ("10.0", "10")] {
            assert_eq!(s.parse::<Decimal>().unwrap().to_string(), out);
        }
        for bad in ["", ".5", "1.", "1e3", "-1", "a"] {
            assert!(bad.parse::<Decimal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_sums() {
        let a: Decimal = "0.4".parse().unwrap();
        let b: Decimal = "0.3".parse().unwrap();
        let c: Decimal = "0.7".parse().unwrap();
        assert_eq!(a.rational() + b.rational(), c.rational().clone());
    }

    #[test]
    fn only_terminating_fractions() {
        let third = BigRational::new(1.into(), 3.into());
        assert!(Decimal::from_rational(third).is_none());
        let eighth = BigRational::new(1.into(), 8.into());
        assert_eq!(Decimal::from_rational(eighth).unwrap().to_string(), "0.125");
    }
}
