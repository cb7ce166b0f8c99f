//! Exact non-negative fractions used for robustness thresholds.
//!
//! Thresholds such as `alpha * d` are compared against integer overlap counts
//! with a strict inequality, so they are never rounded through `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FractionError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse `{0}` as a fraction (expected P/Q, an integer, or a finite decimal)")]
    Parse(String),
}

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self, FractionError> {
        if den == 0 {
            return Err(FractionError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub const ONE: Fraction = Fraction { num: 1, den: 1 };
    pub const HALF: Fraction = Fraction { num: 1, den: 2 };

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self * factor`, reduced. Fails only on `u64` overflow of the reduced result.
    pub fn mul_int(&self, factor: u64) -> Option<Fraction> {
        let g = factor.gcd(&self.den);
        let num = self.num.checked_mul(factor / g)?;
        Some(Fraction { num, den: self.den / g })
    }

    /// `self / divisor`, reduced.
    pub fn div_int(&self, divisor: u64) -> Option<Fraction> {
        if divisor == 0 {
            return None;
        }
        let g = divisor.gcd(&self.num);
        Fraction::new(self.num / g, self.den.checked_mul(divisor / g)?).ok()
    }

    /// Compares the integer `count` against `self * scale` exactly.
    pub fn cmp_scaled(&self, count: u64, scale: u64) -> Ordering {
        (count as u128 * self.den as u128).cmp(&(self.num as u128 * scale as u128))
    }

    /// Smallest integer `t` with `t >= self * scale`.
    pub fn ceil_scaled(&self, scale: u64) -> u64 {
        let prod = self.num as u128 * scale as u128;
        prod.div_ceil(self.den as u128) as u64
    }

    pub fn gt_one(&self) -> bool {
        self.num > self.den
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = FractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || FractionError::Parse(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Fraction::new(p, q);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let whole: u64 = if whole.is_empty() {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            let den = 10u64.pow(frac.len() as u32);
            let frac: u64 = frac.parse().map_err(|_| bad())?;
            let num = whole
                .checked_mul(den)
                .and_then(|w| w.checked_add(frac))
                .ok_or_else(bad)?;
            return Fraction::new(num, den);
        }
        let p: u64 = s.parse().map_err(|_| bad())?;
        Fraction::new(p, 1)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!("1/2".parse::<Fraction>().unwrap(), Fraction::HALF);
        assert_eq!("0.5".parse::<Fraction>().unwrap(), Fraction::HALF);
        assert_eq!("2/4".parse::<Fraction>().unwrap(), Fraction::HALF);
        assert_eq!("1".parse::<Fraction>().unwrap(), Fraction::ONE);
        assert_eq!(".8".parse::<Fraction>().unwrap(), Fraction::new(4, 5).unwrap());
        assert!("1/0".parse::<Fraction>().is_err());
        assert!("x/2".parse::<Fraction>().is_err());
        assert!("-1/2".parse::<Fraction>().is_err());
    }

    #[test]
    fn scaled_comparison_is_exact() {
        let half = Fraction::HALF;
        // 3 vs 0.5 * 6 = 3: equal, so a strict "<" must fail.
        assert_eq!(half.cmp_scaled(3, 6), Ordering::Equal);
        assert_eq!(half.cmp_scaled(2, 5), Ordering::Less);
        assert_eq!(half.ceil_scaled(3), 2);
        assert_eq!(half.ceil_scaled(4), 2);
        assert_eq!(Fraction::new(4, 5).unwrap().ceil_scaled(5), 4);
    }

    #[test]
    fn arithmetic() {
        let a = Fraction::new(2, 5).unwrap();
        assert_eq!(a.mul_int(2).unwrap(), Fraction::new(4, 5).unwrap());
        assert_eq!(a.div_int(2).unwrap(), Fraction::new(1, 5).unwrap());
        assert_eq!(
            Fraction::new(3, 7).unwrap().div_int(3).unwrap(),
            Fraction::new(1, 7).unwrap()
        );
        assert_eq!(
            Fraction::new(0, 7).unwrap().div_int(3).unwrap(),
            Fraction::new(0, 1).unwrap()
        );
        assert!(Fraction::new(3, 2).unwrap().gt_one());
        assert!(Fraction::new(4, 5).unwrap() < Fraction::ONE);
    }
}
