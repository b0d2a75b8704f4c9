//! Exact numbers of the form `coeff · √radicand` with squarefree radicand.
//!
//! Every orthogonality sum at a prime p is homogeneous in √p, and products
//! over several primes stay in this shape, so closed form and brute force
//! comparisons can be exact equalities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub coeff: BigRational,
    /// Squarefree; 1 for rational values.
    pub radicand: u64,
}

impl Surd {
    pub fn zero() -> Self {
        Self { coeff: BigRational::zero(), radicand: 1 }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self { coeff, radicand: 1 }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(ratio(num, den))
    }

    /// `num · p^(half/2)` for a prime p and any signed half-exponent.
    pub fn prime_power(num: BigInt, p: u64, half: i64) -> Self {
        let q = half.div_euclid(2);
        let pp = BigInt::from(p).pow(q.unsigned_abs() as u32);
        let coeff = if q >= 0 {
            BigRational::from_integer(num * pp)
        } else {
            BigRational::new(num, pp)
        };
        let radicand = if half.rem_euclid(2) == 1 { p } else { 1 };
        Self { coeff, radicand }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.coeff.is_zero() {
            self.radicand = 1;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Sum of two values over the same radicand; `None` otherwise.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.radicand != other.radicand {
            return None;
        }
        Some(Self { coeff: &self.coeff + &other.coeff, radicand: self.radicand }.normalized())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let g = self.radicand.gcd(&other.radicand);
        let radicand = (self.radicand / g) * (other.radicand / g);
        let coeff = &self.coeff * &other.coeff * BigInt::from(g);
        Self { coeff, radicand }.normalized()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { coeff: &self.coeff * r, radicand: self.radicand }.normalized()
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        c * (self.radicand as f64).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand == 1 {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "({})*sqrt({})", self.coeff, self.radicand)
        }
    }
}

/// `n/d` as a big rational.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_splits_parity() {
        let s = Surd::prime_power(BigInt::from(3), 5, -3);
        assert_eq!(s.radicand, 5);
        assert_eq!(s.coeff, ratio(3, 25));
        assert!((s.to_f64() - 3.0 * 5f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn radicands_combine() {
        let a = Surd::prime_power(BigInt::from(1), 7, 1);
        let b = Surd::ratio(1, 2);
        assert!(a.checked_add(&b).is_none());
        assert_eq!(a.mul(&a), Surd::ratio(7, 1));
        let c = Surd::prime_power(BigInt::from(1), 5, 1);
        let ac = a.mul(&c);
        assert_eq!(ac.radicand, 35);
        assert_eq!(ac.mul(&a), Surd { coeff: ratio(7, 1), radicand: 5 });
    }
}
