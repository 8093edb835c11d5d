use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

pub type Exps = Vec<u32>;

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Multivariate power series truncated at total degree `order`.
///
/// Coefficients are stored sparsely and terms that are zero (including
/// values indistinguishable from zero at their precision) are dropped.
#[derive(Clone)]
pub struct TruncSeries<S: Ring> {
    ctx: S::Ctx,
    nvars: usize,
    order: u32,
    terms: BTreeMap<Exps, S>,
}

impl<S: Ring> PartialEq for TruncSeries<S> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.sub(other).terms.is_empty()
    }
}

impl<S: Ring> fmt::Debug for TruncSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(deg {})", self.to_text(), self.order + 1)
    }
}

impl<S: Ring> TruncSeries<S> {
    pub fn zero(ctx: &S::Ctx, nvars: usize, order: u32) -> Self {
        TruncSeries {
            ctx: ctx.clone(),
            nvars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &S::Ctx, nvars: usize, order: u32, c: S) -> Self {
        let mut s = Self::zero(ctx, nvars, order);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn one(ctx: &S::Ctx, nvars: usize, order: u32) -> Self {
        Self::constant(ctx, nvars, order, S::one(ctx))
    }

    /// The coordinate `x_i` (0-based).
    pub fn var(ctx: &S::Ctx, nvars: usize, order: u32, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut s = Self::zero(ctx, nvars, order);
        s.add_term(e, S::one(ctx));
        s
    }

    pub fn from_terms(
        ctx: &S::Ctx,
        nvars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Exps, S)>,
    ) -> Result<Self> {
        let mut s = Self::zero(ctx, nvars, order);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::usage(format!(
                    "exponent vector {e:?} has length {}, expected {nvars}",
                    e.len()
                )));
            }
            s.add_term(e, c);
        }
        Ok(s)
    }

    /// Adds `c * x^e`, ignoring terms above the truncation order.
    pub fn add_term(&mut self, e: Exps, c: S) {
        if degree(&e) > self.order {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = old.add_ref(&c);
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(e, c);
                }
            }
        }
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> S {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| S::zero(&self.ctx))
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&vec![0; self.nvars])
    }

    /// Least total degree of a stored term; `None` for the zero series.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).min()
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "series in different numbers of variables");
    }

    fn combine(&self, other: &Self, sign: bool) -> Self {
        self.same_shape(other);
        let mut out = Self::zero(&self.ctx, self.nvars, self.order.min(other.order));
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        for (e, c) in &other.terms {
            out.add_term(e.clone(), if sign { c.clone() } else { c.neg_ref() });
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg_ref())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        self.map(|x| x.mul_int(n))
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = Self::zero(&self.ctx, self.nvars, self.order);
        for (e, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    /// Coefficient-wise conversion into another ring.
    pub fn map_ring<R: Ring>(&self, ctx: &R::Ctx, f: impl Fn(&S) -> R) -> TruncSeries<R> {
        let mut out = TruncSeries::zero(ctx, self.nvars, self.order);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_shape(other);
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.ctx, self.nvars, order);
        let mut rhs: Vec<(u32, &Exps, &S)> = other.terms.iter().map(|(e, c)| (degree(e), e, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: BTreeMap<Exps, S> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            if da > order {
                continue;
            }
            for (db, eb, cb) in &rhs {
                if da + db > order {
                    break;
                }
                let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let prod = ca.mul_ref(cb);
                match acc.get_mut(&e) {
                    Some(old) => *old = old.add_ref(&prod),
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        out.terms = acc;
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ctx, self.nvars, self.order);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Drops every term of total degree above `order`.
    pub fn truncate(&self, order: u32) -> Self {
        let mut out = Self::zero(&self.ctx, self.nvars, order.min(self.order));
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// Same terms, declared to a different truncation order.
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = self.truncate(order);
        out.order = order;
        out
    }

    /// Substitutes `subs[i]` for `x_i`.
    ///
    /// Powers of each substituted series are cached and reused across
    /// monomials; terms whose lowest possible degree exceeds the order are
    /// skipped without expansion.
    pub fn compose(&self, subs: &[TruncSeries<S>]) -> Result<TruncSeries<S>> {
        if subs.len() != self.nvars {
            return Err(Error::usage(format!(
                "composition needs {} series, got {}",
                self.nvars,
                subs.len()
            )));
        }
        let Some(first) = subs.first() else {
            return Ok(self.clone());
        };
        let nv = first.nvars;
        let order = subs.iter().map(|s| s.order).min().unwrap().min(self.order);
        for (i, s) in subs.iter().enumerate() {
            if s.nvars != nv {
                return Err(Error::usage("substituted series disagree on the number of variables"));
            }
            if !s.constant_term().is_zero() {
                return Err(Error::usage(format!(
                    "substitution {} has a nonzero constant term",
                    i + 1
                )));
            }
        }
        let low: Vec<u32> = subs.iter().map(|s| s.min_degree().unwrap_or(u32::MAX)).collect();
        let mut max_pow = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 && low[i] != u32::MAX && (k as u64) * (low[i] as u64) <= order as u64 {
                    max_pow[i] = max_pow[i].max(k);
                }
            }
        }
        let mut powers: Vec<Vec<TruncSeries<S>>> = Vec::with_capacity(self.nvars);
        for (i, s) in subs.iter().enumerate() {
            let s = s.truncate(order);
            let mut pw = vec![TruncSeries::one(&self.ctx, nv, order)];
            for k in 1..=max_pow[i] {
                let next = pw[(k - 1) as usize].mul(&s);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut out = TruncSeries::zero(&self.ctx, nv, order);
        'terms: for (e, c) in &self.terms {
            let mut lowest = 0u64;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    if low[i] == u32::MAX {
                        continue 'terms;
                    }
                    lowest += k as u64 * low[i] as u64;
                }
            }
            if lowest > order as u64 {
                continue;
            }
            let mut prod: Option<TruncSeries<S>> = None;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let f = &powers[i][k as usize];
                prod = Some(match prod {
                    None => f.clone(),
                    Some(p) => p.mul(f),
                });
            }
            let term = match prod {
                None => TruncSeries::constant(&self.ctx, nv, order, c.clone()),
                Some(p) => p.scale(c),
            };
            for (te, tc) in term.terms {
                out.add_term(te, tc);
            }
        }
        Ok(out)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(&self.ctx, self.nvars, self.order);
        for (e, c) in &self.terms {
            if degree(e) == d {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Evaluates at a point of the coefficient ring (a polynomial evaluation
    /// of the truncation).
    pub fn eval(&self, point: &[S]) -> Result<S> {
        if point.len() != self.nvars {
            return Err(Error::usage(format!(
                "point has {} coordinates, series has {} variables",
                point.len(),
                self.nvars
            )));
        }
        let mut acc = S::zero(&self.ctx);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = t.mul_ref(&x.pow(k as u64));
                }
            }
            acc = acc.add_ref(&t);
        }
        Ok(acc)
    }

    /// `H(z u)` as a one-variable series; the `z^j` coefficient is the
    /// degree-`j` homogeneous part evaluated at `u`.
    pub fn restrict_to_line(&self, u: &[S]) -> Result<TruncSeries<S>> {
        if u.len() != self.nvars {
            return Err(Error::usage(format!(
                "direction has {} coordinates, series has {} variables",
                u.len(),
                self.nvars
            )));
        }
        let mut out = TruncSeries::zero(&self.ctx, 1, self.order);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in u.iter().zip(e) {
                if k > 0 {
                    t = t.mul_ref(&x.pow(k as u64));
                }
            }
            out.add_term(vec![degree(e)], t);
        }
        Ok(out)
    }

    /// Coefficients `a_0..=a_order` of a one-variable series.
    pub fn univariate_coeffs(&self) -> Vec<S> {
        assert_eq!(self.nvars, 1, "univariate_coeffs on a multivariate series");
        (0..=self.order).map(|j| self.coeff(&[j])).collect()
    }

    pub fn from_univariate(ctx: &S::Ctx, order: u32, coeffs: &[S]) -> Self {
        let mut s = Self::zero(ctx, 1, order);
        for (j, c) in coeffs.iter().enumerate() {
            s.add_term(vec![j as u32], c.clone());
        }
        s
    }

    /// Formal partial derivative in `x_var` (0-based); the result is known
    /// to one degree less.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = Self::zero(&self.ctx, self.nvars, self.order.saturating_sub(1));
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c.mul_ref(&S::from_integer(&self.ctx, &BigInt::from(k))));
        }
        out
    }

    /// Extends the variable list: `x_i` becomes `x_{map[i]}` in `nvars`
    /// variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars, "embedding map has the wrong length");
        let mut out = Self::zero(&self.ctx, nvars, self.order);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] += k;
            }
            out.add_term(ne, c.clone());
        }
        out
    }
}

impl<S: Field> TruncSeries<S> {
    /// Multiplicative inverse of a series with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0_inv = c0.inv()?;
        // 1/f = c0^{-1} (1 + g)^{-1} with g = f/c0 - 1, expanded geometrically
        let g = self.scale(&c0_inv).sub(&Self::one(&self.ctx, self.nvars, self.order));
        let mut acc = Self::one(&self.ctx, self.nvars, self.order);
        let mut term = acc.clone();
        let steps = match g.min_degree() {
            None => 0,
            Some(d) => self.order / d.max(1),
        };
        for _ in 0..steps {
            term = term.mul(&g).neg();
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Formal antiderivative in `x_var` with zero constant of integration.
    pub fn integrate(&self, var: usize) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.nvars, self.order + 1);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[var] += 1;
            out.add_term(ne.clone(), c.div_int(ne[var] as i64)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = TruncSeries<BigRational>;

    fn x(n: usize, t: u32, i: usize) -> Q {
        Q::var(&(), n, t, i)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn compose_examples() {
        let (x1, x2) = (x(2, 6, 0), x(2, 6, 1));
        let z = x(1, 6, 0);
        let h = x1.add(&x2.mul(&x2));
        let r = h.compose(&[z.clone(), z.clone()]).unwrap();
        assert_eq!(r, z.add(&z.mul(&z)));

        let h = x(2, 4, 0).mul(&x(2, 4, 1));
        let z4 = x(1, 4, 0);
        let r = h.compose(&[z4.clone(), z4.mul(&z4)]).unwrap();
        assert_eq!(r, z4.pow(3));

        // (1+x)(1+y) - 1 at x = y = t is 2t + t^2
        let g = x1.add(&x2).add(&x1.mul(&x2));
        let r = g.compose(&[z.clone(), z.clone()]).unwrap();
        assert_eq!(r, z.mul_int(2).add(&z.mul(&z)));
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let h = x(1, 4, 0);
        let bad = Q::one(&(), 1, 4).add(&x(1, 4, 0));
        assert!(matches!(h.compose(&[bad]), Err(Error::Usage(_))));
    }

    #[test]
    fn homogeneous_parts_and_lines() {
        let (x1, x2) = (x(2, 5, 0), x(2, 5, 1));
        let h = x1.add(&x1.mul(&x2)).add(&x2.pow(3));
        assert_eq!(h.homogeneous_part(2), x1.mul(&x2));
        let line = h.restrict_to_line(&[q(1), q(1)]).unwrap();
        let z = x(1, 5, 0);
        assert_eq!(line, z.add(&z.pow(2)).add(&z.pow(3)));
        let sum = (0..=5).fold(Q::zero(&(), 2, 5), |acc, d| acc.add(&h.homogeneous_part(d)));
        assert_eq!(sum, h);
        assert!(h.restrict_to_line(&[q(1)]).is_err());
    }

    #[test]
    fn inverse_and_integral() {
        let z = x(1, 8, 0);
        let f = Q::one(&(), 1, 8).add(&z);
        let inv = f.inverse().unwrap();
        assert_eq!(f.mul(&inv), Q::one(&(), 1, 8));
        let i = inv.integrate(0).unwrap();
        // log(1+z)
        assert_eq!(i.coeff(&[3]), BigRational::new(1.into(), 3.into()));
        assert_eq!(i.coeff(&[4]), BigRational::new((-1).into(), 4.into()));
    }
}
