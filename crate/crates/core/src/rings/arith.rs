//! Integer helpers: primality, factorials, valuations and certified
//! rational brackets for `exp`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Least prime strictly greater than `n`.
pub fn next_prime_above(n: &BigInt) -> BigInt {
    let mut c = n + 1u32;
    loop {
        if let Some(c64) = c.to_u64() {
            if is_prime(c64) {
                return c;
            }
        } else if is_prime_big(&c) {
            return c;
        }
        c += 1u32;
    }
}

fn is_prime_big(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let two = BigInt::from(2);
    if (n % &two).is_zero() {
        return n == &two;
    }
    let mut d = BigInt::from(3);
    while &(&d * &d) <= n {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2;
    }
    true
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn rat_valuation(x: &BigRational, p: u64) -> Option<i64> {
    Some(int_valuation(x.numer(), p)? - int_valuation(x.denom(), p)?)
}

/// Legendre's formula for v_p(n!).
pub fn factorial_valuation(n: u64, p: u64) -> i64 {
    let mut v = 0;
    let mut pk = p;
    while pk <= n {
        v += (n / pk) as i64;
        pk = match pk.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    v
}

pub fn pow_big(base: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Floor of a rational.
pub fn floor_rat(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Ceiling of a rational.
pub fn ceil_rat(x: &BigRational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    n.sqrt()
}

/// Rational interval `[lo, hi]` certified to contain `exp(x)` for a
/// nonnegative rational `x`.
///
/// The lower end is a Taylor partial sum; the upper end adds the tail bound
/// `x^{K+1}/(K+1)! · 1/(1 - x/(K+2))`, valid once `K + 2 > x`.
pub fn exp_bracket(x: &BigRational, terms: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "exp_bracket expects x >= 0");
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let xf = x.to_f64().unwrap_or(f64::MAX);
    let k = terms.max(xf.ceil() as u32 + 2);
    for i in 0..=k {
        if i > 0 {
            term = term * x / BigRational::from_integer(BigInt::from(i));
        }
        sum += &term;
    }
    let next = &term * x / BigRational::from_integer(BigInt::from(k + 1));
    let ratio = x / BigRational::from_integer(BigInt::from(k + 2));
    let tail = next / (BigRational::one() - ratio);
    let hi = &sum + tail;
    (sum, hi)
}

/// Rational bracket around Euler's number.
pub fn e_bracket(terms: u32) -> (BigRational, BigRational) {
    exp_bracket(&BigRational::one(), terms)
}

/// Decides `p > exp(a / e)` exactly for a positive integer `p` and a
/// nonnegative rational `a`, refining the brackets until they separate.
pub fn exceeds_exp_over_e(p: &BigInt, a: &BigRational) -> bool {
    let p = BigRational::from_integer(p.clone());
    let mut terms = 12;
    loop {
        let (e_lo, e_hi) = e_bracket(terms);
        // a/e lies in [a/e_hi, a/e_lo]
        let (_, up) = exp_bracket(&(a / &e_lo), terms);
        if p > up {
            return true;
        }
        let (down, _) = exp_bracket(&(a / &e_hi), terms);
        if p <= down {
            return false;
        }
        terms *= 2;
        assert!(terms < 1 << 16, "exp bracket failed to separate");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_next_prime() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(next_prime_above(&BigInt::from(512)), BigInt::from(521));
        assert_eq!(next_prime_above(&BigInt::from(2744)), BigInt::from(2749));
    }

    #[test]
    fn factorial_valuation_matches_direct() {
        for p in [2u64, 3, 5, 7] {
            for n in 0..30 {
                let direct = int_valuation(&factorial(n), p).unwrap();
                assert_eq!(direct, factorial_valuation(n, p), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }

    #[test]
    fn exp_brackets_contain_value() {
        for (n, d) in [(0, 1), (1, 1), (3, 2), (7, 1)] {
            let x = rat(n, d);
            let (lo, hi) = exp_bracket(&x, 20);
            let v = (n as f64 / d as f64).exp();
            assert!(lo.to_f64().unwrap() <= v + 1e-12 && v - 1e-12 <= hi.to_f64().unwrap());
            assert!(lo <= hi);
        }
    }

    #[test]
    fn exp_over_e_threshold() {
        // exp(1/e) ~ 1.4447, exp(3/e) ~ 3.0151, exp(5/e) ~ 6.2955
        assert!(exceeds_exp_over_e(&BigInt::from(2), &rat(1, 1)));
        assert!(!exceeds_exp_over_e(&BigInt::from(1), &rat(1, 1)));
        assert!(!exceeds_exp_over_e(&BigInt::from(3), &rat(3, 1)));
        assert!(exceeds_exp_over_e(&BigInt::from(4), &rat(3, 1)));
        assert!(!exceeds_exp_over_e(&BigInt::from(6), &rat(5, 1)));
        assert!(exceeds_exp_over_e(&BigInt::from(7), &rat(5, 1)));
    }

    #[test]
    fn floors_and_ceilings() {
        assert_eq!(floor_rat(&rat(17, 5)), BigInt::from(3));
        assert_eq!(ceil_rat(&rat(17, 5)), BigInt::from(4));
        assert_eq!(floor_rat(&rat(-1, 2)), BigInt::from(-1));
        assert_eq!(ceil_rat(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(isqrt(&BigInt::from(99)), BigInt::from(9));
    }
}
