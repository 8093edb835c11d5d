//! Capped-precision p-adic numbers.
//!
//! A nonzero value is `p^v * u` with `u` a unit known modulo `p^rel`. The
//! relative precision `rel` never exceeds the context cap; the absolute
//! precision of the value is `v + rel`. Zero is either exact or known only
//! modulo `p^abs`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rings::arith::{int_valuation, is_prime, pow_big};
use crate::scalar::{Field, Ring};

/// Default relative precision in p-adic digits.
pub const DEFAULT_PREC: u32 = 32;

/// Valuation of a p-adic number; `Infinite` marks zero and compares above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// The ring `Q_p` at a fixed precision cap.
pub struct Padic {
    p: u64,
    cap: u32,
    p_big: BigInt,
    powers: Vec<BigInt>,
}

impl PartialEq for Padic {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.cap == other.cap
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{}(prec {})", self.p, self.cap)
    }
}

impl Padic {
    pub fn new(p: u64, cap: u32) -> Result<Arc<Padic>> {
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        if cap == 0 {
            return Err(Error::usage("p-adic precision must be positive"));
        }
        let powers = (0..=2 * cap + 2).map(|k| pow_big(p, k)).collect();
        Ok(Arc::new(Padic {
            p,
            cap,
            p_big: BigInt::from(p),
            powers,
        }))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn pk(&self, k: u32) -> BigInt {
        match self.powers.get(k as usize) {
            Some(x) => x.clone(),
            None => pow_big(self.p, k),
        }
    }

    pub fn exact_zero(self: &Arc<Self>) -> PadicNum {
        PadicNum {
            ctx: Arc::clone(self),
            repr: Repr::Zero { abs: None },
        }
    }

    /// Zero known modulo `p^abs`.
    pub fn zero_mod(self: &Arc<Self>, abs: i64) -> PadicNum {
        PadicNum {
            ctx: Arc::clone(self),
            repr: Repr::Zero { abs: Some(abs) },
        }
    }

    pub fn from_int(self: &Arc<Self>, n: &BigInt) -> PadicNum {
        match int_valuation(n, self.p) {
            None => self.exact_zero(),
            Some(v) => {
                let unit = n / self.pk(v as u32);
                self.make(v, unit, self.cap)
            }
        }
    }

    pub fn from_rational(self: &Arc<Self>, x: &BigRational) -> PadicNum {
        if Zero::is_zero(x) {
            return self.exact_zero();
        }
        let num = self.from_int(x.numer());
        let den = self.from_int(x.denom());
        num.div_checked(&den).expect("nonzero denominator")
    }

    /// `p^v * unit` known to `rel` digits; `unit` must be prime to `p`.
    pub fn from_parts(self: &Arc<Self>, v: i64, unit: BigInt, rel: u32) -> Result<PadicNum> {
        if (&unit % &self.p_big).is_zero() {
            return Err(Error::usage(format!("{unit} is not a {}-adic unit", self.p)));
        }
        if rel == 0 {
            return Err(Error::usage("relative precision must be positive"));
        }
        Ok(self.make(v, unit, rel.min(self.cap)))
    }

    /// Normalizes `p^v * raw` known modulo `p^(v + rel)`, where `raw` may be
    /// divisible by `p`.
    fn normalize(self: &Arc<Self>, v: i64, raw: BigInt, rel: u32) -> PadicNum {
        let modulus = self.pk(rel);
        let raw = raw.mod_floor(&modulus);
        if raw.is_zero() {
            return self.zero_mod(v + rel as i64);
        }
        let k = int_valuation(&raw, self.p).unwrap();
        let unit = raw / self.pk(k as u32);
        self.make(v + k, unit, rel - k as u32)
    }

    fn make(self: &Arc<Self>, v: i64, unit: BigInt, rel: u32) -> PadicNum {
        let rel = rel.min(self.cap);
        let unit = unit.mod_floor(&self.pk(rel));
        PadicNum {
            ctx: Arc::clone(self),
            repr: Repr::Nonzero { v, unit, rel },
        }
    }
}

#[derive(Clone)]
enum Repr {
    Zero { abs: Option<i64> },
    Nonzero { v: i64, unit: BigInt, rel: u32 },
}

#[derive(Clone)]
pub struct PadicNum {
    ctx: Arc<Padic>,
    repr: Repr,
}

/// JSON form `{p, v, unit, prec}`; zero has `v = null` and `prec` the
/// absolute precision (`null` when exact).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u64,
    pub v: Option<i64>,
    pub unit: String,
    pub prec: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked p-adic arithmetic.
pub fn padic_arith(op: PadicOp, a: &PadicNum, b: &PadicNum) -> Result<PadicNum> {
    if a.ctx.p != b.ctx.p {
        return Err(Error::usage(format!(
            "mismatched primes {} and {}",
            a.ctx.p, b.ctx.p
        )));
    }
    Ok(match op {
        PadicOp::Add => a.add_ref(b),
        PadicOp::Sub => a.sub_ref(b),
        PadicOp::Mul => a.mul_ref(b),
        PadicOp::Div => a.div_checked(b)?,
    })
}

impl PadicNum {
    pub fn ctx(&self) -> &Arc<Padic> {
        &self.ctx
    }

    pub fn prime(&self) -> u64 {
        self.ctx.p
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero { .. } => Valuation::Infinite,
            Repr::Nonzero { v, .. } => Valuation::Finite(*v),
        }
    }

    /// Absolute precision; `None` for exact zero.
    pub fn abs_prec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Nonzero { v, rel, .. } => Some(v + *rel as i64),
        }
    }

    /// Relative precision of a nonzero value; 0 for zero.
    pub fn rel_prec(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Nonzero { rel, .. } => *rel,
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { unit, .. } => Some(unit),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    /// Norm `p^(-v)` as an exact rational (`0` for zero).
    pub fn norm(&self) -> BigRational {
        match self.valuation() {
            Valuation::Infinite => <BigRational as Zero>::zero(),
            Valuation::Finite(v) => norm_of_valuation(self.ctx.p, v),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.valuation() >= Valuation::Finite(0)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    /// Residue modulo `p` of an integral value.
    pub fn residue(&self) -> Result<u64> {
        match &self.repr {
            Repr::Zero { abs } => match abs {
                Some(a) if *a < 1 => Err(Error::Precision("residue of an imprecise zero".into())),
                _ => Ok(0),
            },
            Repr::Nonzero { v, unit, .. } => match v.cmp(&0) {
                Ordering::Less => Err(Error::usage("residue of a non-integral value")),
                Ordering::Greater => Ok(0),
                Ordering::Equal => Ok((unit % &self.ctx.p_big).try_into().unwrap()),
            },
        }
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> PadicNum {
        let repr = match &self.repr {
            Repr::Zero { abs } => Repr::Zero {
                abs: abs.map(|a| a + k),
            },
            Repr::Nonzero { v, unit, rel } => Repr::Nonzero {
                v: v + k,
                unit: unit.clone(),
                rel: *rel,
            },
        };
        PadicNum {
            ctx: Arc::clone(&self.ctx),
            repr,
        }
    }

    /// Division, with a precision error when the divisor is an inexact zero.
    pub fn div_checked(&self, rhs: &PadicNum) -> Result<PadicNum> {
        Ok(self.mul_ref(&rhs.inv()?))
    }

    /// Exact rational with the same digits (`p^v * u`, `u` in `[0, p^rel)`).
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => <BigRational as Zero>::zero(),
            Repr::Nonzero { v, unit, .. } => {
                let u = BigRational::from_integer(unit.clone());
                if *v >= 0 {
                    u * BigRational::from_integer(self.ctx.pk(*v as u32))
                } else {
                    u / BigRational::from_integer(self.ctx.pk((-v) as u32))
                }
            }
        }
    }

    pub fn to_json(&self) -> PadicJson {
        match &self.repr {
            Repr::Zero { abs } => PadicJson {
                p: self.ctx.p,
                v: None,
                unit: "0".into(),
                prec: *abs,
            },
            Repr::Nonzero { v, unit, rel } => PadicJson {
                p: self.ctx.p,
                v: Some(*v),
                unit: unit.to_string(),
                prec: Some(*rel as i64),
            },
        }
    }

    pub fn from_json(ctx: &Arc<Padic>, j: &PadicJson) -> Result<PadicNum> {
        if j.p != ctx.p {
            return Err(Error::usage(format!("expected p = {}, found {}", ctx.p, j.p)));
        }
        match j.v {
            None => Ok(match j.prec {
                None => ctx.exact_zero(),
                Some(a) => ctx.zero_mod(a),
            }),
            Some(v) => {
                let unit: BigInt = j
                    .unit
                    .parse()
                    .map_err(|_| Error::parse(format!("bad unit {:?}", j.unit)))?;
                let rel = j.prec.unwrap_or(ctx.cap as i64);
                if rel <= 0 {
                    return Err(Error::parse("prec must be positive"));
                }
                ctx.from_parts(v, unit, rel as u32)
            }
        }
    }
}

pub fn norm_of_valuation(p: u64, v: i64) -> BigRational {
    let pk = BigRational::from_integer(pow_big(p, v.unsigned_abs() as u32));
    if v >= 0 {
        pk.recip()
    } else {
        pk
    }
}

impl fmt::Debug for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Agreement to the precision both sides carry.
impl PartialEq for PadicNum {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p == other.ctx.p && self.sub_ref(other).is_zero()
    }
}

impl Ring for PadicNum {
    type Ctx = Arc<Padic>;

    fn context(&self) -> Arc<Padic> {
        Arc::clone(&self.ctx)
    }
    fn zero(ctx: &Arc<Padic>) -> Self {
        ctx.exact_zero()
    }
    fn one(ctx: &Arc<Padic>) -> Self {
        ctx.make(0, BigInt::one(), ctx.cap)
    }
    fn from_integer(ctx: &Arc<Padic>, n: &BigInt) -> Self {
        ctx.from_int(n)
    }
    fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        let ctx = &self.ctx;
        match (&self.repr, &rhs.repr) {
            (Repr::Zero { abs: None }, _) => rhs.clone(),
            (_, Repr::Zero { abs: None }) => self.clone(),
            (Repr::Zero { abs: Some(a) }, Repr::Zero { abs: Some(b) }) => ctx.zero_mod(*a.min(b)),
            (Repr::Zero { abs: Some(a) }, Repr::Nonzero { v, unit, rel })
            | (Repr::Nonzero { v, unit, rel }, Repr::Zero { abs: Some(a) }) => {
                let abs = (*a).min(v + *rel as i64);
                if abs <= *v {
                    ctx.zero_mod(abs)
                } else {
                    ctx.make(*v, unit.clone(), (abs - v) as u32)
                }
            }
            (
                Repr::Nonzero {
                    v: v1,
                    unit: u1,
                    rel: r1,
                },
                Repr::Nonzero {
                    v: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => {
                let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
                let vmin = *v1.min(v2);
                if abs <= vmin {
                    return ctx.zero_mod(abs);
                }
                let raw = u1 * ctx.pk((v1 - vmin) as u32) + u2 * ctx.pk((v2 - vmin) as u32);
                ctx.normalize(vmin, raw, (abs - vmin) as u32)
            }
        }
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let ctx = &self.ctx;
        match (&self.repr, &rhs.repr) {
            (Repr::Zero { abs: None }, _) | (_, Repr::Zero { abs: None }) => ctx.exact_zero(),
            (Repr::Zero { abs: Some(a) }, Repr::Zero { abs: Some(b) }) => ctx.zero_mod(a + b),
            (Repr::Zero { abs: Some(a) }, Repr::Nonzero { v, .. })
            | (Repr::Nonzero { v, .. }, Repr::Zero { abs: Some(a) }) => ctx.zero_mod(a + v),
            (
                Repr::Nonzero {
                    v: v1,
                    unit: u1,
                    rel: r1,
                },
                Repr::Nonzero {
                    v: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => ctx.make(v1 + v2, u1 * u2, *r1.min(r2)),
        }
    }

    fn neg_ref(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { v, unit, rel } => self.ctx.make(*v, -unit, *rel),
        }
    }

    fn pow(&self, e: u64) -> Self {
        match &self.repr {
            _ if e == 0 => Self::one(&self.ctx),
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => self.ctx.zero_mod(a * e as i64),
            Repr::Nonzero { v, unit, rel } => {
                let m = self.ctx.pk(*rel);
                let u = unit.modpow(&BigInt::from(e), &m);
                self.ctx.make(v * e as i64, u, *rel)
            }
        }
    }

    fn to_text(&self) -> String {
        let p = self.ctx.p;
        match &self.repr {
            Repr::Zero { abs: None } => "0".into(),
            Repr::Zero { abs: Some(a) } => format!("O({p}^{a})"),
            Repr::Nonzero { v, unit, rel } => format!("{p}^{v} * {unit} mod {p}^{rel}"),
        }
    }

    fn parse_text(ctx: &Arc<Padic>, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(format!("not a p-adic number: {s:?}"));
        let power = |t: &str| -> Result<i64> {
            let (base, exp) = t.trim().split_once('^').ok_or_else(bad)?;
            if base.trim().parse::<u64>().map_err(|_| bad())? != ctx.p {
                return Err(Error::parse(format!("{s:?} is not over p = {}", ctx.p)));
            }
            exp.trim().parse::<i64>().map_err(|_| bad())
        };
        if let Some(inner) = s.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
            return Ok(ctx.zero_mod(power(inner)?));
        }
        if let Some((lhs, modulus)) = s.split_once(" mod ") {
            let (pv, unit) = lhs.split_once('*').ok_or_else(bad)?;
            let v = power(pv)?;
            let unit: BigInt = unit.trim().parse().map_err(|_| bad())?;
            let rel = power(modulus)?;
            if rel <= 0 {
                return Err(bad());
            }
            return ctx.from_parts(v, unit, rel as u32);
        }
        let q = crate::scalar::parse_rational(s)?;
        Ok(ctx.from_rational(&q))
    }
}

impl crate::scalar::PValued for PadicNum {
    fn p_valuation(&self, p: u64) -> Option<i64> {
        assert_eq!(p, self.prime(), "valuation at a foreign prime");
        self.valuation().finite()
    }
}

impl Field for PadicNum {
    fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { abs: None } => Err(Error::DivisionByZero),
            Repr::Zero { abs: Some(a) } => Err(Error::Precision(format!(
                "division by a value indistinguishable from zero modulo {}^{a}",
                self.ctx.p
            ))),
            Repr::Nonzero { v, unit, rel } => {
                let m = self.ctx.pk(*rel);
                let inv = unit.extended_gcd(&m).x.mod_floor(&m);
                Ok(self.ctx.make(-v, inv, *rel))
            }
        }
    }
}

crate::impl_ring_ops!(PadicNum);

/// Square root of `c` in `Z_p` (`p` odd, `c` a unit square mod `p`) by
/// digit-by-digit lifting, to `digits` digits.
pub fn hensel_sqrt(c: &BigInt, p: u64, digits: u32) -> Option<BigInt> {
    let pb = BigInt::from(p);
    let r0 = (0..p)
        .map(BigInt::from)
        .find(|r| ((r * r - c).mod_floor(&pb)).is_zero() && !r.is_zero())?;
    let mut root = r0;
    let mut modulus = pb.clone();
    for _ in 1..digits {
        let next = &modulus * &pb;
        let t = (0..p)
            .map(|d| &root + &modulus * d)
            .find(|r| ((r * r - c).mod_floor(&next)).is_zero())?;
        root = t;
        modulus = next;
    }
    debug_assert!(!root.is_negative());
    Some(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Arc<Padic> {
        Padic::new(p, DEFAULT_PREC).unwrap()
    }

    #[test]
    fn carry_into_valuation() {
        let k = q(5);
        let a = k.from_int(&BigInt::from(2 * 125));
        let b = k.from_int(&BigInt::from(3 * 125));
        assert_eq!((a + b).valuation(), Valuation::Finite(4));
    }

    #[test]
    fn division_shifts_valuation() {
        let k = q(7);
        let a = k.from_int(&BigInt::from(49 * 3));
        let b = k.from_int(&BigInt::from(7));
        let c = padic_arith(PadicOp::Div, &a, &b).unwrap();
        assert_eq!(c.valuation(), Valuation::Finite(1));
        assert_eq!(c.unit(), Some(&BigInt::from(3)));
    }

    #[test]
    fn norm_of_p() {
        let k = q(5);
        assert_eq!(k.from_int(&BigInt::from(5)).norm(), BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn cancellation_loses_precision() {
        let k = Padic::new(5, 4).unwrap();
        let a = k.from_int(&BigInt::from(1));
        let b = k.from_int(&BigInt::from(1 + 625));
        let d = &b - &a;
        assert!(d.is_zero());
        assert_eq!(d.abs_prec(), Some(4));
        assert!(matches!(d.inv(), Err(Error::Precision(_))));
        assert_eq!(k.exact_zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn text_and_json_round_trip() {
        let k = q(7);
        let x = k.from_rational(&BigRational::new((-3).into(), 98.into()));
        assert_eq!(x.valuation(), Valuation::Finite(-2));
        let t = x.to_text();
        let y = PadicNum::parse_text(&k, &t).unwrap();
        assert_eq!(y.to_text(), t);
        let j = serde_json::to_string(&x.to_json()).unwrap();
        let back: PadicJson = serde_json::from_str(&j).unwrap();
        assert_eq!(PadicNum::from_json(&k, &back).unwrap().to_text(), t);
        assert_eq!(PadicNum::parse_text(&k, "O(7^3)").unwrap().to_text(), "O(7^3)");
    }

    #[test]
    fn mismatched_primes_rejected() {
        let a = q(5).from_int(&BigInt::from(1));
        let b = q(7).from_int(&BigInt::from(1));
        assert!(matches!(padic_arith(PadicOp::Add, &a, &b), Err(Error::Usage(_))));
    }

    #[test]
    fn valuation_order() {
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
        assert!(Valuation::Finite(-3) < Valuation::Finite(2));
    }

    #[test]
    fn hensel_square_roots() {
        for p in [5u64, 7, 11] {
            let c = BigInt::from(1 + 3 * p as i64);
            let r = hensel_sqrt(&c, p, 10).unwrap();
            let m = pow_big(p, 10);
            assert!(((&r * &r - &c).mod_floor(&m)).is_zero());
        }
    }

    #[test]
    fn rational_round_trip() {
        let k = q(11);
        for (n, d) in [(1, 3), (-22, 7), (5, 121), (0, 1)] {
            let x = BigRational::new(n.into(), d.into());
            let px = k.from_rational(&x);
            let back = k.from_rational(&px.to_rational());
            assert_eq!(px, back);
            let diff = px.sub_ref(&k.from_rational(&x));
            assert!(diff.is_zero());
        }
    }
}
