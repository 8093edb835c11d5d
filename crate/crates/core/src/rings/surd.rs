//! Exact quadratic surds `a + b*sqrt(d)` with rational `a`, `b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rings::arith::{floor_rat, isqrt};

/// `a + b*sqrt(d)` for a fixed positive integer `d`.
///
/// When `d` is a perfect square the radical is folded into `a` at
/// construction, so `b != 0` implies `sqrt(d)` is irrational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSurd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadSurd {
    pub fn new(a: BigRational, b: BigRational, d: impl Into<BigInt>) -> Self {
        let d = d.into();
        assert!(d.is_positive(), "radicand must be positive");
        if b.is_zero() {
            return QuadSurd { a, b, d: BigInt::one() };
        }
        let r = isqrt(&d);
        if &r * &r == d {
            return QuadSurd {
                a: a + b * BigRational::from_integer(r),
                b: BigRational::zero(),
                d: BigInt::one(),
            };
        }
        QuadSurd { a, b, d }
    }

    pub fn rational(a: BigRational, d: impl Into<BigInt>) -> Self {
        Self::new(a, BigRational::zero(), d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: impl Into<BigInt>) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    fn compatible(&self, other: &QuadSurd) -> BigInt {
        if self.b.is_zero() {
            return other.d.clone();
        }
        if other.b.is_zero() || self.d == other.d {
            return self.d.clone();
        }
        panic!("surds over different radicands {} and {}", self.d, other.d);
    }

    pub fn scale(&self, c: &BigRational) -> QuadSurd {
        QuadSurd::new(&self.a * c, &self.b * c, self.d.clone())
    }

    /// Sign decided by comparing `a^2` against `b^2 d`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn floor(&self) -> BigInt {
        let approx = self.to_f64().floor();
        let mut n = if approx.is_finite() {
            BigInt::from(approx as i128)
        } else {
            floor_rat(&self.a)
        };
        let int = |n: &BigInt| QuadSurd::rational(BigRational::from_integer(n.clone()), self.d.clone());
        while (self.clone() - int(&n)).signum() == Ordering::Less {
            n -= 1;
        }
        while (self.clone() - int(&(&n + 1))).signum() != Ordering::Less {
            n += 1;
        }
        n
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Display-only approximation.
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}*sqrt({})", self.a, sign, self.b.abs(), self.d)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum())
    }
}

impl Add for QuadSurd {
    type Output = QuadSurd;
    fn add(self, rhs: QuadSurd) -> QuadSurd {
        let d = self.compatible(&rhs);
        QuadSurd::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for QuadSurd {
    type Output = QuadSurd;
    fn sub(self, rhs: QuadSurd) -> QuadSurd {
        self + (-rhs)
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Mul for QuadSurd {
    type Output = QuadSurd;
    fn mul(self, rhs: QuadSurd) -> QuadSurd {
        let d = self.compatible(&rhs);
        let dr = BigRational::from_integer(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadSurd::new(a, b, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::arith::{rat, rat_int};

    #[test]
    fn perfect_squares_fold() {
        let s = QuadSurd::sqrt(9);
        assert_eq!(s.surd_part(), &BigRational::zero());
        assert_eq!(s.rational_part(), &rat_int(3));
    }

    #[test]
    fn signs_and_floors() {
        // 3 - sqrt(7) ~ 0.354
        let x = QuadSurd::new(rat_int(3), rat_int(-1), 7);
        assert_eq!(x.signum(), Ordering::Greater);
        assert_eq!(x.floor(), BigInt::zero());
        assert_eq!(x.ceil(), BigInt::one());
        // 50 + (6/5)(10 + 4 sqrt 7) ~ 74.70
        let b = QuadSurd::rational(rat_int(50), 7)
            + (QuadSurd::rational(rat_int(10), 7) + QuadSurd::sqrt(7).scale(&rat_int(4))).scale(&rat(6, 5));
        assert_eq!(b.floor(), BigInt::from(74));
        assert_eq!(b.to_string(), "62+24/5*sqrt(7)");
    }

    #[test]
    fn thin_comparison() {
        // 6 (520/519)(521 + 4 sqrt 521 + 3) ~ 3698.9 vs 7.1 * 521 = 3699.1
        let lhs = (QuadSurd::rational(rat_int(524), 521) + QuadSurd::sqrt(521).scale(&rat_int(4)))
            .scale(&(rat_int(6) * rat(520, 519)));
        let rhs = QuadSurd::rational(rat(71, 10) * rat_int(521), 521);
        assert!(lhs < rhs);
    }

    #[test]
    fn products() {
        let s = QuadSurd::sqrt(5);
        let sq = s.clone() * s;
        assert_eq!(sq, QuadSurd::rational(rat_int(5), 1));
        assert_eq!(sq.floor(), BigInt::from(5));
    }
}
