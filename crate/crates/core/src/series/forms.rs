//! One-forms `f1 ds1 + f2 ds2` on a two-dimensional chart and one-forms on
//! jet rings `k[z]/(z^{m+1})`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Ring;
use crate::series::trunc::TruncSeries;

pub const CHART_NAMES: [&str; 2] = ["s1", "s2"];

#[derive(Clone, PartialEq)]
pub struct PolyOneForm<S: Ring> {
    pub f1: TruncSeries<S>,
    pub f2: TruncSeries<S>,
}

impl<S: Ring> fmt::Debug for PolyOneForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl<S: Ring> PolyOneForm<S> {
    pub fn new(f1: TruncSeries<S>, f2: TruncSeries<S>) -> Result<Self> {
        if f1.nvars() != 2 || f2.nvars() != 2 {
            return Err(Error::usage("one-form coefficients must be series in s1, s2"));
        }
        let order = f1.order().min(f2.order());
        Ok(PolyOneForm {
            f1: f1.with_order(order),
            f2: f2.with_order(order),
        })
    }

    pub fn order(&self) -> u32 {
        self.f1.order()
    }

    pub fn ds1(ctx: &S::Ctx, order: u32) -> Self {
        PolyOneForm {
            f1: TruncSeries::one(ctx, 2, order),
            f2: TruncSeries::zero(ctx, 2, order),
        }
    }

    pub fn ds2(ctx: &S::Ctx, order: u32) -> Self {
        PolyOneForm {
            f1: TruncSeries::zero(ctx, 2, order),
            f2: TruncSeries::one(ctx, 2, order),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyOneForm {
            f1: self.f1.add(&other.f1),
            f2: self.f2.add(&other.f2),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        PolyOneForm {
            f1: self.f1.scale(c),
            f2: self.f2.scale(c),
        }
    }

    /// Coefficient `F` of `ds1 ^ ds2` in `self ^ other`.
    pub fn wedge(&self, other: &Self) -> TruncSeries<S> {
        self.f1.mul(&other.f2).sub(&self.f2.mul(&other.f1))
    }

    /// Pullback along a curve `t -> (phi1(t), phi2(t))`, returned as the
    /// coefficient of `dt`.
    pub fn pullback(&self, phi1: &TruncSeries<S>, phi2: &TruncSeries<S>) -> Result<TruncSeries<S>> {
        let subs = [phi1.clone(), phi2.clone()];
        let a = self.f1.compose(&subs)?.mul(&phi1.derivative(0));
        let b = self.f2.compose(&subs)?.mul(&phi2.derivative(0));
        Ok(a.add(&b))
    }

    /// Text `(f1) ds1 + (f2) ds2`, omitting zero parts.
    pub fn to_text(&self) -> String {
        let part = |f: &TruncSeries<S>, d: &str| {
            let t = f.to_text_with(&CHART_NAMES);
            if t == "1" {
                d.to_string()
            } else {
                format!("({t}) {d}")
            }
        };
        match (self.f1.is_zero(), self.f2.is_zero()) {
            (true, true) => "0".into(),
            (false, true) => part(&self.f1, "ds1"),
            (true, false) => part(&self.f2, "ds2"),
            (false, false) => format!("{} + {}", part(&self.f1, "ds1"), part(&self.f2, "ds2")),
        }
    }

    /// Parses a sum of terms `(f) ds1`, `(g) ds2`, `ds1`, `-ds2`, ...
    pub fn parse(ctx: &S::Ctx, order: u32, s: &str) -> Result<Self> {
        let mut f1 = TruncSeries::zero(ctx, 2, order);
        let mut f2 = TruncSeries::zero(ctx, 2, order);
        let s = s.trim();
        if s == "0" {
            return Ok(PolyOneForm { f1, f2 });
        }
        let mut rest = s;
        let mut saw_any = false;
        while !rest.trim().is_empty() {
            let mut r = rest.trim_start();
            let mut negative = false;
            if !saw_any || r.starts_with(['+', '-']) {
                if let Some(x) = r.strip_prefix('+') {
                    r = x.trim_start();
                } else if let Some(x) = r.strip_prefix('-') {
                    negative = true;
                    r = x.trim_start();
                } else if saw_any {
                    return Err(Error::parse(format!("expected '+' or '-' in {s:?}")));
                }
            } else {
                return Err(Error::parse(format!("expected '+' or '-' in {s:?}")));
            }
            let (coeff, after) = if r.starts_with('(') {
                let close = matching_paren(r).ok_or_else(|| Error::parse(format!("unbalanced parentheses in {s:?}")))?;
                let inner = &r[1..close];
                let series = TruncSeries::parse_with(ctx, &CHART_NAMES, order, inner)?;
                (series, r[close + 1..].trim_start())
            } else {
                (TruncSeries::one(ctx, 2, order), r)
            };
            let after = after.strip_prefix('*').map(str::trim_start).unwrap_or(after);
            let (target, tail) = if let Some(t) = after.strip_prefix("ds1") {
                (&mut f1, t)
            } else if let Some(t) = after.strip_prefix("ds2") {
                (&mut f2, t)
            } else {
                return Err(Error::parse(format!("expected ds1 or ds2 in {s:?}")));
            };
            *target = if negative { target.sub(&coeff) } else { target.add(&coeff) };
            rest = tail;
            saw_any = true;
        }
        Ok(PolyOneForm { f1, f2 })
    }
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// `g dz` in the module of differentials of `k[z]/(z^{m+1})`, with `g`
/// reduced modulo `(z^{m+1}, (m+1) z^m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetRingForm<S: Ring> {
    pub m: u32,
    pub g: Vec<S>,
}

impl<S: Ring> JetRingForm<S> {
    pub fn is_zero(&self) -> bool {
        self.g.iter().all(|c| c.is_zero())
    }
}

/// Reduces `g` (coefficients `g[0] + g[1] z + ...`) modulo the relations of
/// the jet ring of order `m`.
pub fn jetring_reduce<S: Ring>(ctx: &S::Ctx, g: &[S], m: u32) -> JetRingForm<S> {
    let top_dies = !S::from_i64(ctx, m as i64 + 1).is_zero();
    let keep = if top_dies { m as usize } else { m as usize + 1 };
    let mut out: Vec<S> = g.iter().take(keep).cloned().collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    JetRingForm { m, g: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::FiniteField;
    use num_rational::BigRational;

    type Q = TruncSeries<BigRational>;

    #[test]
    fn wedge_of_sharp_example() {
        let w1 = PolyOneForm::<BigRational>::parse(&(), 6, "ds1 + (s1^2) ds2").unwrap();
        let w2 = PolyOneForm::<BigRational>::parse(&(), 6, "ds1 + (s2^2) ds2").unwrap();
        let f = w1.wedge(&w2);
        assert_eq!(f.to_text_with(&CHART_NAMES), "-s1^2 + s2^2");
        assert!(w1.wedge(&w1).is_zero());
        assert_eq!(w1.to_text(), "ds1 + (s1^2) ds2");
    }

    #[test]
    fn form_parsing_variants() {
        let w = PolyOneForm::<BigRational>::parse(&(), 4, "-(s2) ds1 + (2) ds2 - ds1").unwrap();
        assert_eq!(w.to_text(), "(-1 - s2) ds1 + (2) ds2");
        assert!(PolyOneForm::<BigRational>::parse(&(), 4, "ds3").is_err());
        assert!(PolyOneForm::<BigRational>::parse(&(), 4, "ds1 ds2").is_err());
    }

    #[test]
    fn derivative_in_char_3() {
        let f3 = FiniteField::prime(3).unwrap();
        let z3 = TruncSeries::<crate::rings::FqElem>::var(&f3, 1, 5, 0).pow(3);
        assert!(z3.derivative(0).is_zero());
    }

    #[test]
    fn jet_ring_relations() {
        let f5 = FiniteField::prime(5).unwrap();
        let one = f5.from_int(1);
        let g = vec![one.clone(), one.clone(), one.clone()];
        assert_eq!(jetring_reduce(&f5, &g, 2).g, vec![one.clone(), one.clone()]);
        let z4 = vec![f5.from_int(0), f5.from_int(0), f5.from_int(0), f5.from_int(0), one.clone()];
        assert_eq!(jetring_reduce(&f5, &z4, 4).g.len(), 5);
        assert_eq!(jetring_reduce(&f5, &g, 0).g, Vec::<_>::new());
    }

    #[test]
    fn pullback_along_branch() {
        let w = PolyOneForm::<BigRational>::parse(&(), 8, "ds1 + (s1^2) ds2").unwrap();
        let t = Q::var(&(), 1, 8, 0);
        let g = w.pullback(&t, &t).unwrap();
        assert_eq!(g.to_text(), "1 + x1^2");
    }
}
