//! Parameters of a finite extension `K/Q_p` entering the bound formulas.
//!
//! Only `e` and `f` are recorded; no arithmetic in ramified extensions is
//! performed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rings::arith::{exceeds_exp_over_e, is_prime, pow_big, rat_int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalFieldParams {
    pub p: u64,
    pub e: u32,
    pub f: u32,
}

impl LocalFieldParams {
    pub fn new(p: u64, e: u32, f: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        if e == 0 || f == 0 {
            return Err(Error::usage("ramification index and residue degree must be positive"));
        }
        Ok(LocalFieldParams { p, e, f })
    }

    pub fn unramified(p: u64) -> Result<Self> {
        Self::new(p, 1, 1)
    }

    /// Residue field size `q = p^f`.
    pub fn q(&self) -> BigInt {
        pow_big(self.p, self.f)
    }

    /// `lambda = e/(p-1)`.
    pub fn lambda(&self) -> BigRational {
        BigRational::new(BigInt::from(self.e), BigInt::from(self.p - 1))
    }

    /// `lambda` recomputed as `log M / log r^{-1}` with `M = p^{ef/(p-1)}`
    /// and `r = p^{-f}`; both logarithms are rational multiples of `log p`.
    pub fn lambda_from_growth(&self) -> BigRational {
        let log_m = BigRational::new(BigInt::from(self.e * self.f), BigInt::from(self.p - 1));
        let log_rinv = rat_int(self.f);
        log_m / log_rinv
    }

    /// `p > max{e + 1, exp(e / exp(1))}`.
    pub fn ramification_guard(&self) -> bool {
        let p = BigInt::from(self.p);
        p > BigInt::from(self.e + 1) && exceeds_exp_over_e(&p, &rat_int(self.e))
    }

    pub fn one_minus_lambda(&self) -> BigRational {
        BigRational::one() - self.lambda()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::arith::rat;

    #[test]
    fn lambda_identity() {
        for (p, e, f) in [(5, 1, 1), (7, 2, 3), (11, 3, 2), (3, 1, 4)] {
            let k = LocalFieldParams::new(p, e, f).unwrap();
            assert_eq!(k.lambda(), k.lambda_from_growth());
        }
        assert_eq!(LocalFieldParams::unramified(7).unwrap().lambda(), rat(1, 6));
    }

    #[test]
    fn unramified_guard_is_p_at_least_3() {
        assert!(!LocalFieldParams::unramified(2).unwrap().ramification_guard());
        for p in [3, 5, 7, 11] {
            assert!(LocalFieldParams::unramified(p).unwrap().ramification_guard());
        }
    }

    #[test]
    fn ramified_guard() {
        // e = 5: max(6, exp(5/e) ~ 6.30), so p = 7 is the least admissible prime.
        assert!(!LocalFieldParams::new(5, 5, 1).unwrap().ramification_guard());
        assert!(LocalFieldParams::new(7, 5, 1).unwrap().ramification_guard());
    }

    #[test]
    fn residue_field_size_is_exact() {
        let k = LocalFieldParams::new(3, 1, 50).unwrap();
        assert_eq!(k.q(), num_traits::pow(BigInt::from(3), 50));
    }
}
