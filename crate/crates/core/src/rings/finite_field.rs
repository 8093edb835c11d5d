//! Finite fields `F_{p^s}` with elements stored as base-`p` digit indices.
//!
//! An element `c_0 + c_1 w + ... + c_{s-1} w^{s-1}` (with `w` the class of
//! `x` modulo the defining polynomial) is stored as the integer
//! `c_0 + c_1 p + ... + c_{s-1} p^{s-1}`. Fields small enough for the
//! enumeration cap also get discrete-log tables so that multiplication is a
//! table lookup.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rings::arith::is_prime;
use crate::scalar::{Field, Ring};

/// Default bound on the number of elements any exhaustive loop may visit.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

/// Enumeration cap, overridable through the `CC_ENUM_CAP` environment variable.
pub fn enumeration_cap() -> u64 {
    std::env::var("CC_ENUM_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

const TABLE_LIMIT: u64 = 1 << 22;

pub struct FiniteField {
    p: u64,
    s: u32,
    /// Monic defining polynomial, low degree first, length `s + 1`.
    modulus: Vec<u64>,
    size: u64,
    tables: Option<LogTables>,
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[{:?}]", self.p, self.s, self.modulus)
    }
}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<FiniteField>> {
        Self::extension(p, 1)
    }

    /// `F_{p^s}` with the lexicographically first monic irreducible modulus.
    pub fn extension(p: u64, s: u32) -> Result<Arc<FiniteField>> {
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        if s == 0 {
            return Err(Error::usage("extension degree must be at least 1"));
        }
        let modulus = default_modulus(p, s)?;
        Self::build(p, modulus)
    }

    /// `F_p[x]/(modulus)` for a user-supplied monic modulus, low degree first.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Arc<FiniteField>> {
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::usage("modulus must be monic of degree >= 1"));
        }
        if !is_irreducible(p, &modulus)? {
            return Err(Error::usage(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Self::build(p, modulus)
    }

    fn build(p: u64, modulus: Vec<u64>) -> Result<Arc<FiniteField>> {
        let s = (modulus.len() - 1) as u32;
        let size = p
            .checked_pow(s)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or_else(|| Error::Resource(format!("F_{p}^{s} is too large")))?;
        let mut field = FiniteField {
            p,
            s,
            modulus,
            size,
            tables: None,
        };
        if size <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(Arc::new(field))
    }

    fn build_tables(&self) -> LogTables {
        let q = self.size as usize;
        if q == 2 {
            return LogTables {
                exp: vec![1],
                log: vec![0, 0],
            };
        }
        let order = self.size - 1;
        let factors = prime_factors(order);
        let gen = (2..self.size)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&l| self.slow_pow(g as u32, order / l) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = self.slow_mul(cur, gen as u32);
        }
        LogTables { exp, log }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn digits(&self, v: u32) -> Vec<u64> {
        let mut v = v as u64;
        (0..self.s)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u64]) -> u32 {
        d.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32
    }

    fn raw_add(&self, a: u32, b: u32) -> u32 {
        if self.s == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&sum)
    }

    fn raw_neg(&self, a: u32) -> u32 {
        if self.s == 1 {
            return ((self.p - a as u64) % self.p) as u32;
        }
        let d: Vec<u64> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.undigits(&d)
    }

    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.s == 1 {
            return ((a as u64 * b as u64) % self.p) as u32;
        }
        match &self.tables {
            Some(t) => {
                let order = (self.size - 1) as usize;
                let i = (t.log[a as usize] as usize + t.log[b as usize] as usize) % order;
                t.exp[i]
            }
            None => self.slow_mul(a, b),
        }
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let s = self.s as usize;
        let mut prod = vec![0u64; 2 * s];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for k in (s..2 * s).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, m) in self.modulus[..s].iter().enumerate() {
                let idx = k - s + i;
                prod[idx] = (prod[idx] + (self.p - c) * m) % self.p;
            }
        }
        self.undigits(&prod[..s])
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn raw_inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.s == 1 {
            let inv = BigInt::from(a).extended_gcd(&BigInt::from(self.p)).x;
            let inv = inv.mod_floor(&BigInt::from(self.p));
            return Some(inv.to_u32().unwrap());
        }
        match &self.tables {
            Some(t) => {
                let order = (self.size - 1) as usize;
                let l = t.log[a as usize] as usize;
                Some(t.exp[(order - l) % order])
            }
            None => Some(self.slow_pow(a, self.size - 2)),
        }
    }

    /// Element with the given digit index.
    pub fn elem(self: &Arc<Self>, index: u64) -> FqElem {
        FqElem {
            field: Arc::clone(self),
            value: (index % self.size) as u32,
        }
    }

    /// Element from a coefficient vector (low degree first).
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[i64]) -> Result<FqElem> {
        if coeffs.len() > self.s as usize {
            return Err(Error::usage(format!(
                "coefficient vector of length {} for a degree-{} field",
                coeffs.len(),
                self.s
            )));
        }
        let mut d = vec![0u64; self.s as usize];
        for (slot, &c) in d.iter_mut().zip(coeffs) {
            *slot = c.rem_euclid(self.p as i64) as u64;
        }
        Ok(FqElem {
            field: Arc::clone(self),
            value: self.undigits(&d),
        })
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FqElem {
        self.elem(n.rem_euclid(self.p as i64) as u64)
    }

    /// The class `w` of `x` modulo the defining polynomial.
    pub fn generator_w(self: &Arc<Self>) -> FqElem {
        if self.s == 1 {
            let m0 = self.modulus[0];
            return self.elem((self.p - m0) % self.p);
        }
        self.elem(self.p)
    }

    /// Every element, in lexicographic order of coefficient vectors
    /// (`c_{s-1}` most significant).
    pub fn enumerate(self: &Arc<Self>) -> Result<Vec<FqElem>> {
        self.enumerate_with_cap(enumeration_cap())
    }

    pub fn enumerate_with_cap(self: &Arc<Self>, cap: u64) -> Result<Vec<FqElem>> {
        if self.size > cap {
            return Err(Error::Resource(format!(
                "field of size {} exceeds the enumeration cap {cap}",
                self.size
            )));
        }
        Ok((0..self.size).map(|i| self.elem(i)).collect())
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo the monic `b` over `F_p`.
fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * bi) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
fn is_irreducible(p: u64, f: &[u64]) -> Result<bool> {
    let deg = f.len() - 1;
    if deg == 1 {
        return Ok(true);
    }
    let work = p.checked_pow((deg / 2) as u32).unwrap_or(u64::MAX);
    if work > 10 * DEFAULT_ENUM_CAP {
        return Err(Error::Resource(format!(
            "irreducibility check for degree {deg} over F_{p} is too large"
        )));
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if poly_rem(p, f, &g).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Lexicographically first monic irreducible polynomial of degree `s`.
pub fn default_modulus(p: u64, s: u32) -> Result<Vec<u64>> {
    if s == 1 {
        return Ok(vec![0, 1]);
    }
    let count = p
        .checked_pow(s)
        .ok_or_else(|| Error::Resource(format!("F_{p}^{s} is too large")))?;
    for idx in 0..count {
        let mut f = Vec::with_capacity(s as usize + 1);
        let mut v = idx;
        for _ in 0..s {
            f.push(v % p);
            v /= p;
        }
        f.push(1);
        if f[0] != 0 && is_irreducible(p, &f)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Element of a [`FiniteField`].
#[derive(Clone)]
pub struct FqElem {
    field: Arc<FiniteField>,
    value: u32,
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
            && (Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field)
    }
}

impl Eq for FqElem {}

impl std::hash::Hash for FqElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Operation selector for [`ff_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Pow,
}

/// Checked field arithmetic; `Pow` reads its exponent from `exponent`.
pub fn ff_arith(op: FieldOp, a: &FqElem, b: Option<&FqElem>, exponent: u64) -> Result<FqElem> {
    let other = || b.ok_or_else(|| Error::usage("binary operation needs a second operand"));
    match op {
        FieldOp::Add => a.try_add(other()?),
        FieldOp::Mul => a.try_mul(other()?),
        FieldOp::Inv => a.inv(),
        FieldOp::Pow => Ok(Ring::pow(a, exponent)),
    }
}

impl FqElem {
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn index(&self) -> u64 {
        self.value as u64
    }

    /// Coefficient vector, low degree first.
    pub fn coeffs(&self) -> Vec<u64> {
        self.field.digits(self.value)
    }

    fn check_same(&self, other: &FqElem) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "mismatched fields {:?} and {:?}",
                self.field, other.field
            )))
        }
    }

    pub fn try_add(&self, other: &FqElem) -> Result<FqElem> {
        self.check_same(other)?;
        Ok(self.add_ref(other))
    }

    pub fn try_mul(&self, other: &FqElem) -> Result<FqElem> {
        self.check_same(other)?;
        Ok(self.mul_ref(other))
    }

    pub fn frobenius(&self) -> FqElem {
        Ring::pow(self, self.field.p)
    }

    fn with(&self, value: u32) -> FqElem {
        FqElem {
            field: Arc::clone(&self.field),
            value,
        }
    }

    /// The integer representative in `0..p` when the element lies in the
    /// prime field.
    pub fn as_prime_field(&self) -> Option<u64> {
        if (self.value as u64) < self.field.p {
            Some(self.value as u64)
        } else {
            None
        }
    }
}

impl Ring for FqElem {
    type Ctx = Arc<FiniteField>;

    fn context(&self) -> Arc<FiniteField> {
        Arc::clone(&self.field)
    }
    fn zero(ctx: &Arc<FiniteField>) -> Self {
        ctx.elem(0)
    }
    fn one(ctx: &Arc<FiniteField>) -> Self {
        ctx.elem(1)
    }
    fn from_integer(ctx: &Arc<FiniteField>, n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(ctx.p));
        ctx.elem(r.to_u64().unwrap())
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        debug_assert!(self.check_same(rhs).is_ok());
        self.with(self.field.raw_add(self.value, rhs.value))
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        let n = self.field.raw_neg(rhs.value);
        self.with(self.field.raw_add(self.value, n))
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        debug_assert!(self.check_same(rhs).is_ok());
        self.with(self.field.raw_mul(self.value, rhs.value))
    }
    fn neg_ref(&self) -> Self {
        self.with(self.field.raw_neg(self.value))
    }
    fn to_text(&self) -> String {
        if self.field.s == 1 {
            return self.value.to_string();
        }
        let c: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
        format!("[{}]", c.join(","))
    }
    fn parse_text(ctx: &Arc<FiniteField>, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(format!("bad coefficient vector {s:?}")))?;
            return ctx.from_coeffs(&coeffs);
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::parse(format!("bad field element {s:?}")))?;
        Ok(Self::from_integer(ctx, &n))
    }
    fn is_atomic_text(&self) -> bool {
        true
    }
}

impl Field for FqElem {
    fn inv(&self) -> Result<Self> {
        self.field
            .raw_inv(self.value)
            .map(|v| self.with(v))
            .ok_or(Error::DivisionByZero)
    }
}

crate::impl_ring_ops!(FqElem);

/// Field homomorphism `F_{p^a} -> F_{p^b}` (`a | b`), sending `w` to the
/// first root of its minimal polynomial in enumeration order.
#[derive(Debug, Clone)]
pub struct Embedding {
    to: Arc<FiniteField>,
    image_w: FqElem,
}

impl Embedding {
    pub fn new(from: &Arc<FiniteField>, to: &Arc<FiniteField>) -> Result<Self> {
        if from.p != to.p || !to.s.is_multiple_of(from.s) {
            return Err(Error::usage(format!("no embedding of {from:?} into {to:?}")));
        }
        let eval = |x: &FqElem| {
            from.modulus
                .iter()
                .rev()
                .fold(to.elem(0), |acc, &c| acc.mul_ref(x).add_ref(&to.from_int(c as i64)))
        };
        let image_w = if **from == **to {
            to.generator_w()
        } else if from.s == 1 {
            from.generator_w().as_prime_field().map(|v| to.from_int(v as i64)).unwrap()
        } else {
            (0..to.size)
                .map(|i| to.elem(i))
                .find(|x| eval(x).is_zero())
                .expect("finite fields of compatible degree embed")
        };
        Ok(Embedding {
            to: Arc::clone(to),
            image_w,
        })
    }

    pub fn target(&self) -> &Arc<FiniteField> {
        &self.to
    }

    pub fn apply(&self, x: &FqElem) -> FqElem {
        x.coeffs()
            .iter()
            .rev()
            .fold(self.to.elem(0), |acc, &c| {
                acc.mul_ref(&self.image_w).add_ref(&self.to.from_int(c as i64))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(f5.from_int(3) + f5.from_int(4), f5.from_int(2));
        let f7 = FiniteField::prime(7).unwrap();
        assert_eq!(f7.from_int(2).inv().unwrap(), f7.from_int(4));
        assert_eq!(f7.from_int(0).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn f4_reduction() {
        let f4 = FiniteField::extension(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let w = f4.generator_w();
        let w2 = &w * &w;
        assert_eq!(w2, f4.from_coeffs(&[1, 1]).unwrap());
        let names: Vec<String> = f4.enumerate().unwrap().iter().map(|e| e.to_text()).collect();
        assert_eq!(names, vec!["[0,0]", "[1,0]", "[0,1]", "[1,1]"]);
    }

    #[test]
    fn enumeration_counts_and_cap() {
        let f3 = FiniteField::prime(3).unwrap();
        let e: Vec<u64> = f3.enumerate().unwrap().iter().map(|x| x.index()).collect();
        assert_eq!(e, vec![0, 1, 2]);
        let f25 = FiniteField::extension(5, 2).unwrap();
        let all = f25.enumerate().unwrap();
        assert_eq!(all.len(), 25);
        let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 25);
        assert!(matches!(f25.enumerate_with_cap(10), Err(Error::Resource(_))));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = FiniteField::prime(5).unwrap().from_int(1);
        let b = FiniteField::prime(7).unwrap().from_int(1);
        assert!(matches!(a.try_add(&b), Err(Error::Usage(_))));
        assert!(matches!(ff_arith(FieldOp::Mul, &a, Some(&b), 0), Err(Error::Usage(_))));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 2)(x + 3) over F_5
        assert!(FiniteField::with_modulus(5, &[1, 0, 1]).is_err());
        assert!(FiniteField::with_modulus(7, &[1, 0, 1]).is_ok());
    }

    #[test]
    fn field_axioms_by_enumeration() {
        for (p, s) in [(2, 3), (3, 2), (5, 2), (7, 1), (2, 4)] {
            let f = FiniteField::extension(p, s).unwrap();
            let q = f.size();
            let all = f.enumerate().unwrap();
            for x in &all {
                assert_eq!(Ring::pow(x, q), *x, "x^q = x in F_{p}^{s}");
                if !x.is_zero() {
                    assert!((x * &x.inv().unwrap()) == Ring::one(&f));
                }
                for y in all.iter().step_by(3) {
                    assert_eq!((x + y).frobenius(), x.frobenius() + y.frobenius());
                    assert_eq!((x * y).frobenius(), x.frobenius() * y.frobenius());
                    assert_eq!(x.slow_check_mul(y), x * y);
                }
            }
        }
    }

    impl FqElem {
        fn slow_check_mul(&self, other: &FqElem) -> FqElem {
            self.with(self.field.slow_mul(self.value, other.value))
        }
    }

    #[test]
    fn text_round_trip() {
        let f = FiniteField::extension(3, 3).unwrap();
        for x in f.enumerate().unwrap() {
            assert_eq!(FqElem::parse_text(&f, &x.to_text()).unwrap(), x);
        }
    }

    #[test]
    fn embeddings_respect_arithmetic() {
        let f9 = FiniteField::extension(3, 2).unwrap();
        let f81 = FiniteField::extension(3, 4).unwrap();
        let e = Embedding::new(&f9, &f81).unwrap();
        let all = f9.enumerate().unwrap();
        for a in &all {
            for b in &all {
                assert_eq!(e.apply(&a.mul_ref(b)), e.apply(a).mul_ref(&e.apply(b)));
                assert_eq!(e.apply(&a.add_ref(b)), e.apply(a).add_ref(&e.apply(b)));
            }
        }
        let f7 = FiniteField::prime(7).unwrap();
        let f49 = FiniteField::extension(7, 2).unwrap();
        assert_eq!(Embedding::new(&f7, &f49).unwrap().apply(&f7.from_int(3)), f49.from_int(3));
        assert!(Embedding::new(&f9, &FiniteField::extension(3, 3).unwrap()).is_err());
    }
}
