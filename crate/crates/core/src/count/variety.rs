use std::sync::Arc;

use serde::Serialize;

use crate::count::upoly::{self, UPoly};
use crate::error::{Error, Result};
use crate::rings::{enumeration_cap, FiniteField, FqElem};
use crate::scalar::Ring;
use crate::series::TruncSeries;

const PARSE_ORDER: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    Affine(usize),
    Projective(usize),
}

impl Ambient {
    pub fn nvars(self) -> usize {
        match self {
            Ambient::Affine(n) => n,
            Ambient::Projective(n) => n + 1,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Ambient::Affine(n) | Ambient::Projective(n) => n,
        }
    }
}

/// `x, y, z` for up to three variables, `x1, x2, ...` beyond.
pub fn variable_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// `q = p^s`, or an error when `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::usage(format!("q = {q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let (mut r, mut s) = (q, 0);
    while r % p == 0 {
        r /= p;
        s += 1;
    }
    if r != 1 {
        return Err(Error::usage(format!("q = {q} is not a prime power")));
    }
    Ok((p, s))
}

/// Polynomial with coefficients in the prime field, as `(exponents, residue)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Vec<u32>, u64)>,
    p: u64,
}

impl Poly {
    fn from_series(s: &TruncSeries<FqElem>, p: u64) -> Self {
        let terms = s
            .terms()
            .map(|(e, c)| (e.to_vec(), c.as_prime_field().expect("prime field coefficient")))
            .collect();
        Poly {
            nvars: s.nvars(),
            terms,
            p,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.iter().all(|(e, _)| e.iter().sum::<u32>() == d)
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let k = e[var] as u64 % self.p;
                if k == 0 {
                    return None;
                }
                let mut e = e.clone();
                e[var] -= 1;
                Some((e, c * k % self.p))
            })
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
            p: self.p,
        }
    }

    pub fn eval(&self, x: &[FqElem]) -> FqElem {
        let k = x[0].field();
        self.terms.iter().fold(k.elem(0), |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(x)
                .fold(k.from_int(*c as i64), |m, (&ei, xi)| m.mul_ref(&xi.pow(ei as u64)));
            acc.add_ref(&mono)
        })
    }

    /// The polynomial in the last variable obtained by fixing the others.
    fn restrict_last(&self, prefix: &[FqElem], k: &Arc<FiniteField>) -> UPoly {
        let top = self.terms.iter().map(|(e, _)| e[self.nvars - 1]).max().unwrap_or(0);
        let mut out = vec![k.elem(0); top as usize + 1];
        for (e, c) in &self.terms {
            let coeff = e[..self.nvars - 1]
                .iter()
                .zip(prefix)
                .fold(k.from_int(*c as i64), |m, (&ei, xi)| m.mul_ref(&xi.pow(ei as u64)));
            let slot = &mut out[e[self.nvars - 1] as usize];
            *slot = slot.add_ref(&coeff);
        }
        out
    }

    /// `f(s_1, ..., s_n)` for series in one variable.
    pub fn eval_series(&self, k: &Arc<FiniteField>, subs: &[TruncSeries<FqElem>]) -> TruncSeries<FqElem> {
        let order = subs[0].order();
        self.terms.iter().fold(TruncSeries::zero(k, 1, order), |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(subs)
                .fold(TruncSeries::constant(k, 1, order, k.from_int(*c as i64)), |m, (&ei, s)| m.mul(&s.pow(ei)));
            acc.add(&mono)
        })
    }

    pub fn to_series(&self, k: &Arc<FiniteField>, order: u32) -> TruncSeries<FqElem> {
        let mut s = TruncSeries::zero(k, self.nvars, order);
        for (e, c) in &self.terms {
            s.add_term(e.clone(), k.from_int(*c as i64));
        }
        s
    }
}

/// Zero locus of polynomials with prime-field coefficients, over `F_q`.
#[derive(Debug, Clone)]
pub struct Variety {
    ambient: Ambient,
    p: u64,
    s: u32,
    polys: Vec<Poly>,
}

impl Variety {
    pub fn parse<T: AsRef<str>>(ambient: Ambient, q: u64, polys: &[T]) -> Result<Self> {
        let (p, s) = prime_power(q)?;
        let nvars = ambient.nvars();
        if nvars == 0 {
            return Err(Error::usage("the ambient space has no coordinates"));
        }
        let k = FiniteField::prime(p)?;
        let names = variable_names(nvars);
        let mut out = Vec::with_capacity(polys.len());
        for (i, text) in polys.iter().enumerate() {
            let series = TruncSeries::parse_with(&k, &names, PARSE_ORDER, text.as_ref())
                .map_err(|e| Error::parse(format!("polynomial {}: {e}", i + 1)))?;
            let poly = Poly::from_series(&series, p);
            if poly.degree() >= PARSE_ORDER {
                return Err(Error::usage(format!("polynomial {} has too high a degree", i + 1)));
            }
            if matches!(ambient, Ambient::Projective(_)) && !poly.is_homogeneous() {
                return Err(Error::usage(format!("polynomial {} is not homogeneous", i + 1)));
            }
            out.push(poly);
        }
        Ok(Variety {
            ambient,
            p,
            s,
            polys: out,
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.s)
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn names(&self) -> Vec<String> {
        variable_names(self.ambient.nvars())
    }

    /// `F_{q^n}` with its default modulus.
    pub fn field(&self, n: u32) -> Result<Arc<FiniteField>> {
        if n == 0 {
            return Err(Error::usage("extension degree must be at least 1"));
        }
        FiniteField::extension(self.p, self.s * n)
    }

    /// The coordinate fibers to enumerate: every fixed prefix of all but the
    /// last coordinate, plus (projectively) the point `[0:...:0:1]`.
    fn fibers(&self, k: &Arc<FiniteField>) -> Result<(Vec<Vec<FqElem>>, bool)> {
        let qn = k.size();
        let cap = enumeration_cap();
        let budget = |free: usize| qn.checked_pow(free as u32).filter(|&c| c <= cap);
        let mut fibers = Vec::new();
        let mut push_all = |head: Vec<FqElem>, free: usize| -> Result<()> {
            let count = budget(free).ok_or_else(|| {
                Error::Resource(format!(
                    "enumerating {qn}^{free} coordinate values exceeds the cap {cap}"
                ))
            })?;
            for idx in 0..count {
                let mut v = head.clone();
                let mut r = idx;
                for _ in 0..free {
                    v.push(k.elem(r % qn));
                    r /= qn;
                }
                fibers.push(v);
            }
            if fibers.len() as u64 > cap {
                return Err(Error::Resource(format!("more than {cap} fibers to enumerate")));
            }
            Ok(())
        };
        match self.ambient {
            Ambient::Affine(n) => {
                push_all(Vec::new(), n - 1)?;
                Ok((fibers, false))
            }
            Ambient::Projective(n) => {
                for i in 0..n {
                    let mut head = vec![k.elem(0); i];
                    head.push(k.elem(1));
                    push_all(head, n - 1 - i)?;
                }
                Ok((fibers, true))
            }
        }
    }

    fn common_rational_part(polys: &[Poly], prefix: &[FqElem], k: &Arc<FiniteField>) -> Option<UPoly> {
        let mut g: Option<UPoly> = None;
        for f in polys {
            let r = upoly::trim(f.restrict_last(prefix, k));
            if r.is_empty() {
                continue;
            }
            g = Some(match g {
                None => r,
                Some(acc) => upoly::gcd(acc, r),
            });
        }
        g.map(|g| upoly::rational_part(g, k).expect("nonzero"))
    }

    fn apex(&self, k: &Arc<FiniteField>) -> Vec<FqElem> {
        let mut pt = vec![k.elem(0); self.ambient.nvars()];
        *pt.last_mut().unwrap() = k.elem(1);
        pt
    }

    /// `#V(F_{q^n})`.
    pub fn count_points(&self, n: u32) -> Result<u64> {
        let k = self.field(n)?;
        let (fibers, apex) = self.fibers(&k)?;
        let mut total = 0u64;
        for prefix in &fibers {
            total += match Self::common_rational_part(&self.polys, prefix, &k) {
                None => k.size(),
                Some(g) => (g.len() - 1) as u64,
            };
        }
        if apex {
            let pt = self.apex(&k);
            total += self.polys.iter().all(|f| f.eval(&pt).is_zero()) as u64;
        }
        Ok(total)
    }

    /// Points of `V(F_{q^n})` where every polynomial and every partial
    /// derivative of the (single) defining polynomial vanishes. Projective
    /// points are normalized with first nonzero coordinate 1.
    pub fn singular_points(&self, n: u32) -> Result<Vec<Vec<FqElem>>> {
        if self.polys.len() != 1 {
            return Err(Error::usage("the singularity scan needs a hypersurface (one polynomial)"));
        }
        let f = &self.polys[0];
        let mut system = vec![f.clone()];
        system.extend((0..f.nvars).map(|i| f.derivative(i)));
        let k = self.field(n)?;
        let (fibers, apex) = self.fibers(&k)?;
        let mut out = Vec::new();
        let all = k.enumerate()?;
        for prefix in &fibers {
            let roots: Vec<&FqElem> = match Self::common_rational_part(&system, prefix, &k) {
                None => all.iter().collect(),
                Some(g) if g.len() > 1 => all.iter().filter(|y| upoly::eval(&g, y).is_zero()).collect(),
                Some(_) => continue,
            };
            for y in roots {
                let mut pt = prefix.clone();
                pt.push(y.clone());
                out.push(pt);
            }
        }
        if apex {
            let pt = self.apex(&k);
            if system.iter().all(|g| g.eval(&pt).is_zero()) {
                out.push(pt);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_projective_plane(v: &Variety, n: u32) -> u64 {
        let k = v.field(n).unwrap();
        let all = k.enumerate().unwrap();
        let mut count = 0;
        for x in &all {
            for y in &all {
                for z in &all {
                    let pt = [x.clone(), y.clone(), z.clone()];
                    let lead = pt.iter().find(|c| !c.is_zero());
                    if lead.is_some_and(|c| *c == k.elem(1)) && v.polys().iter().all(|f| f.eval(&pt).is_zero()) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn trivial_counts() {
        let parabola = Variety::parse(Ambient::Affine(2), 5, &["y - x^2"]).unwrap();
        assert_eq!(parabola.count_points(1).unwrap(), 5);
        for q in [2, 5, 9] {
            let line = Variety::parse::<&str>(Ambient::Projective(1), q, &[]).unwrap();
            assert_eq!(line.count_points(1).unwrap(), q + 1);
        }
        let plane = Variety::parse::<&str>(Ambient::Projective(2), 3, &[]).unwrap();
        assert_eq!(plane.count_points(2).unwrap(), 81 + 9 + 1);
    }

    #[test]
    fn fiber_counts_agree_with_brute_force() {
        let curves = ["y^2*z - x^3 - x^2*z", "y^2*z - x^3", "y^2*z^2 - 2*y*z^3 - x^4 + 2*x^2*z^2", "x*y*z"];
        for q in [5, 7, 9] {
            for c in curves {
                let v = Variety::parse(Ambient::Projective(2), q, &[c]).unwrap();
                assert_eq!(v.count_points(1).unwrap(), brute_projective_plane(&v, 1), "{c} over F_{q}");
            }
        }
        let v = Variety::parse(Ambient::Projective(2), 3, &["y^2*z - x^3 - x^2*z"]).unwrap();
        assert_eq!(v.count_points(2).unwrap(), brute_projective_plane(&v, 2));
    }

    #[test]
    fn nodal_cubic_has_split_node() {
        // tangent cone y^2 = x^2 splits, so the count is q
        for q in [5, 7, 11] {
            let v = Variety::parse(Ambient::Projective(2), q, &["y^2*z - x^3 - x^2*z"]).unwrap();
            assert_eq!(v.count_points(1).unwrap(), q);
        }
    }

    #[test]
    fn singular_scan() {
        let k = FiniteField::prime(5).unwrap();
        let v = Variety::parse(Ambient::Projective(2), 5, &["y^2*z - x^3 - x^2*z"]).unwrap();
        let sing = v.singular_points(1).unwrap();
        assert_eq!(sing, vec![vec![k.elem(0), k.elem(0), k.elem(1)]]);
        assert_eq!(v.singular_points(2).unwrap().len(), 1);
        let pair = Variety::parse(Ambient::Projective(2), 5, &["y^2*z^2 - 2*y*z^3 - x^4 + 2*x^2*z^2"]).unwrap();
        assert_eq!(pair.singular_points(1).unwrap().len(), 3);
        let smooth = Variety::parse(Ambient::Projective(2), 7, &["y^2*z - x^3 - z^3"]).unwrap();
        assert!(smooth.singular_points(2).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Variety::parse(Ambient::Projective(2), 5, &["y - x^2"]).is_err());
        assert!(Variety::parse(Ambient::Affine(2), 6, &["y"]).is_err());
        assert_eq!(prime_power(49).unwrap(), (7, 2));
    }
}
