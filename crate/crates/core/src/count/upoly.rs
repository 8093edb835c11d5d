//! Dense univariate polynomials over a finite field, low degree first.

use std::sync::Arc;

use crate::rings::{FiniteField, FqElem};
use crate::scalar::{Field, Ring};

pub(crate) type UPoly = Vec<FqElem>;

pub(crate) fn trim(mut a: UPoly) -> UPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn rem(a: &[FqElem], b: &[FqElem]) -> UPoly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = b[db].inv().expect("trimmed divisor");
    while r.len() > db {
        let c = r.last().unwrap().mul_ref(&lead_inv);
        let shift = r.len() - 1 - db;
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = r[shift + i].sub_ref(&c.mul_ref(bi));
            }
        }
        r.pop();
    }
    trim(r)
}

fn mul_mod(a: &[FqElem], b: &[FqElem], m: &[FqElem], k: &Arc<FiniteField>) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.elem(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
        }
    }
    rem(&out, m)
}

pub(crate) fn gcd(a: UPoly, b: UPoly) -> UPoly {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// `y^e mod m`.
fn pow_y_mod(e: u64, m: &[FqElem], k: &Arc<FiniteField>) -> UPoly {
    let y = rem(&[k.elem(0), k.elem(1)], m);
    let mut acc = rem(&[k.elem(1)], m);
    for bit in (0..64 - e.leading_zeros()).rev() {
        acc = mul_mod(&acc, &acc, m, k);
        if (e >> bit) & 1 == 1 {
            acc = mul_mod(&acc, &y, m, k);
        }
    }
    acc
}

/// `gcd(f, y^|k| - y)`: the product of the distinct linear factors of `f`.
/// `None` when `f` is the zero polynomial.
pub(crate) fn rational_part(f: UPoly, k: &Arc<FiniteField>) -> Option<UPoly> {
    let f = trim(f);
    if f.is_empty() {
        return None;
    }
    if f.len() == 1 {
        return Some(f);
    }
    let mut t = pow_y_mod(k.size(), &f, k);
    while t.len() < 2 {
        t.push(k.elem(0));
    }
    t[1] = t[1].sub_ref(&k.elem(1));
    Some(gcd(f, t))
}

/// Number of distinct roots in the field; `size` for the zero polynomial.
#[cfg(test)]
fn count_roots(f: UPoly, k: &Arc<FiniteField>) -> u64 {
    match rational_part(f, k) {
        None => k.size(),
        Some(g) => (g.len() - 1) as u64,
    }
}

pub(crate) fn eval(f: &[FqElem], x: &FqElem) -> FqElem {
    f.iter()
        .rev()
        .fold(x.field().elem(0), |acc, c| acc.mul_ref(x).add_ref(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts_match_enumeration() {
        for (p, s) in [(5, 1), (7, 1), (3, 2)] {
            let k = FiniteField::extension(p, s).unwrap();
            let all = k.enumerate().unwrap();
            let polys: Vec<Vec<i64>> = vec![vec![1, 0, 1], vec![0, -1, 0, 1], vec![2, 3, 1], vec![4], vec![-1, 0, 0, 0, 1]];
            for c in polys {
                let f: UPoly = c.iter().map(|&v| k.from_int(v)).collect();
                let brute = all.iter().filter(|x| eval(&f, x).is_zero()).count() as u64;
                assert_eq!(count_roots(f, &k), brute, "p={p} s={s} {c:?}");
            }
            assert_eq!(count_roots(vec![k.elem(0)], &k), k.size());
        }
    }
}
