//! Scalar abstraction shared by series, formal groups and jet searches.
//!
//! Coefficient rings in this crate carry runtime parameters (a prime, a
//! precision cap, an extension modulus), so the usual context-free
//! `num_traits::Zero` cannot build them. Every ring instead names a context
//! type from which constants are created; context-free rings (rationals,
//! floats) use `()`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Commutative ring with identity.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + Sized + 'static {
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn context(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_integer(ctx: &Self::Ctx, n: &BigInt) -> Self;

    /// True when the value is zero, or indistinguishable from zero at the
    /// precision the value carries.
    fn is_zero(&self) -> bool;

    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// Canonical text form, parsed back exactly by [`Ring::parse_text`].
    fn to_text(&self) -> String;
    fn parse_text(ctx: &Self::Ctx, s: &str) -> Result<Self>;

    fn from_i64(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_integer(ctx, &BigInt::from(n))
    }

    fn mul_int(&self, n: i64) -> Self {
        self.mul_ref(&Self::from_i64(&self.context(), n))
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.context());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Whether the text form needs parentheses when used as a coefficient.
    fn is_atomic_text(&self) -> bool {
        let t = self.to_text();
        !t.contains(['+', ' ']) && !t[1..].contains('-')
    }
}

/// Ring in which nonzero elements can be inverted.
pub trait Field: Ring {
    fn inv(&self) -> Result<Self>;

    fn div_ref(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul_ref(&rhs.inv()?))
    }

    fn div_int(&self, n: i64) -> Result<Self> {
        self.div_ref(&Self::from_i64(&self.context(), n))
    }
}

/// Field carrying a `p`-adic valuation; `None` stands for zero.
pub trait PValued: Field {
    fn p_valuation(&self, p: u64) -> Option<i64>;
}

impl PValued for BigRational {
    fn p_valuation(&self, p: u64) -> Option<i64> {
        crate::rings::arith::rat_valuation(self, p)
    }
}

/// Adds the four arithmetic operator traits to a concrete ring type by
/// delegating to the by-reference ring methods.
#[macro_export]
macro_rules! impl_ring_ops {
    ($t:ty) => {
        impl std::ops::Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                $crate::scalar::Ring::add_ref(&self, &rhs)
            }
        }
        impl<'a> std::ops::Add<&'a $t> for &'a $t {
            type Output = $t;
            fn add(self, rhs: &'a $t) -> $t {
                $crate::scalar::Ring::add_ref(self, rhs)
            }
        }
        impl std::ops::Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                $crate::scalar::Ring::sub_ref(&self, &rhs)
            }
        }
        impl<'a> std::ops::Sub<&'a $t> for &'a $t {
            type Output = $t;
            fn sub(self, rhs: &'a $t) -> $t {
                $crate::scalar::Ring::sub_ref(self, rhs)
            }
        }
        impl std::ops::Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                $crate::scalar::Ring::mul_ref(&self, &rhs)
            }
        }
        impl<'a> std::ops::Mul<&'a $t> for &'a $t {
            type Output = $t;
            fn mul(self, rhs: &'a $t) -> $t {
                $crate::scalar::Ring::mul_ref(self, rhs)
            }
        }
        impl std::ops::Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                $crate::scalar::Ring::neg_ref(&self)
            }
        }
    };
}

impl Ring for BigRational {
    type Ctx = ();

    fn context(&self) {}
    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_integer(_: &(), n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(_: &(), s: &str) -> Result<Self> {
        parse_rational(s)
    }
    fn is_atomic_text(&self) -> bool {
        !self.is_negative()
    }
}

impl Field for BigRational {
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.recip())
    }
}

/// Parses `"a"` or `"a/b"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if Zero::is_zero(&d) {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

macro_rules! impl_float_ring {
    ($f:ty) => {
        impl Ring for $f {
            type Ctx = ();

            fn context(&self) {}
            fn zero(_: &()) -> Self {
                <$f as Zero>::zero()
            }
            fn one(_: &()) -> Self {
                <$f as One>::one()
            }
            fn from_integer(_: &(), n: &BigInt) -> Self {
                n.to_f64().and_then(<$f as FromPrimitive>::from_f64).unwrap_or(<$f as Float>::nan())
            }
            fn is_zero(&self) -> bool {
                *self == 0.0
            }
            fn add_ref(&self, rhs: &Self) -> Self {
                self + rhs
            }
            fn sub_ref(&self, rhs: &Self) -> Self {
                self - rhs
            }
            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }
            fn neg_ref(&self) -> Self {
                -self
            }
            fn to_text(&self) -> String {
                format!("{:?}", self)
            }
            fn parse_text(_: &(), s: &str) -> Result<Self> {
                s.trim().parse::<$f>().map_err(|e| Error::parse(format!("{s:?}: {e}")))
            }
            fn is_atomic_text(&self) -> bool {
                self.is_sign_positive()
            }
        }

        impl Field for $f {
            fn inv(&self) -> Result<Self> {
                if *self == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(self.recip())
            }
        }
    };
}

impl_float_ring!(f32);
impl_float_ring!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(q.to_text(), "-3/2");
        assert_eq!(BigRational::parse_text(&(), &q.to_text()).unwrap(), q);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn pow_by_squaring() {
        let two = <BigRational as Ring>::from_i64(&(), 2);
        assert_eq!(two.pow(10), <BigRational as Ring>::from_i64(&(), 1024));
        assert_eq!(3.0f64.pow(3), 27.0);
    }
}
