use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jetint::jet::{is_integral, JetMap, JetMapJson};
use crate::report::Check;
use crate::rings::{FiniteField, FqElem};
use crate::scalar::{Field, Ring};
use crate::series::{PolyOneForm, TruncSeries};

pub const DEFAULT_NODE_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetSearchConfig {
    pub m_cap: u32,
    /// Largest extension degree `s` of the residue field searched.
    pub ext_cap: u32,
    pub node_budget: u64,
}

impl JetSearchConfig {
    pub fn new(m_cap: u32, ext_cap: u32) -> Self {
        JetSearchConfig {
            m_cap,
            ext_cap,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JetOrder {
    Exact(u32),
    /// The search stopped (cap or node budget) with this order reached.
    AtLeast(u32),
}

impl JetOrder {
    pub fn value(self) -> u32 {
        match self {
            JetOrder::Exact(m) | JetOrder::AtLeast(m) => m,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, JetOrder::Exact(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldResult {
    pub field_size: u64,
    pub m: JetOrder,
    pub nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JetSearchReport {
    pub m: JetOrder,
    /// Size of the smallest searched field realising `m`.
    pub field_size: u64,
    pub witness: Option<JetMapJson>,
    #[serde(skip)]
    pub witness_jet: Option<JetMap<FqElem>>,
    pub per_field: Vec<FieldResult>,
    pub reason: Option<String>,
    pub checks: Vec<Check>,
}

/// `f(s + x)` for a polynomial `f` in two variables.
pub fn translate<S: Ring>(f: &TruncSeries<S>, x: &[S]) -> TruncSeries<S> {
    let ctx = f.ctx();
    let (n, t) = (f.nvars(), f.order());
    let shifted: Vec<TruncSeries<S>> = (0..n)
        .map(|i| TruncSeries::var(ctx, n, t, i).add(&TruncSeries::constant(ctx, n, t, x[i].clone())))
        .collect();
    let mut out = TruncSeries::zero(ctx, n, t);
    for (e, c) in f.terms() {
        let mut term = TruncSeries::constant(ctx, n, t, c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                term = term.mul(&shifted[i].pow(k));
            }
        }
        out = out.add(&term);
    }
    out
}

fn embed_prime(f: &TruncSeries<FqElem>, ext: &Arc<FiniteField>) -> TruncSeries<FqElem> {
    f.map_ring(ext, |c| ext.from_int(c.as_prime_field().expect("prime-field coefficient") as i64))
}

type Vec2 = [FqElem; 2];

struct Search<'a> {
    field: Arc<FiniteField>,
    p: u64,
    forms: [PolyOneForm<FqElem>; 2],
    m0: [Vec2; 2],
    elems: &'a [FqElem],
    m_cap: u32,
    budget: u64,
    nodes: u64,
    best: u32,
    witness: Option<Vec<Vec2>>,
    stopped: Option<String>,
}

impl Search<'_> {
    fn zero(&self) -> FqElem {
        FqElem::zero(&self.field)
    }

    /// `z^d` coefficients of both pullbacks along the jet `c_1..c_d`.
    fn residual(&self, cs: &[Vec2]) -> Result<Vec2> {
        let d = cs.len() as u32;
        let series = |i: usize| {
            let mut s = TruncSeries::zero(&self.field, 1, d + 1);
            for (k, c) in cs.iter().enumerate() {
                s.add_term(vec![k as u32 + 1], c[i].clone());
            }
            s
        };
        let (p1, p2) = (series(0), series(1));
        let r = |w: &PolyOneForm<FqElem>| -> Result<FqElem> {
            let w = PolyOneForm {
                f1: w.f1.with_order(d + 1),
                f2: w.f2.with_order(d + 1),
            };
            Ok(w.pullback(&p1, &p2)?.coeff(&[d]))
        };
        Ok([r(&self.forms[0])?, r(&self.forms[1])?])
    }

    fn dfs(&mut self, cs: &mut Vec<Vec2>) -> Result<()> {
        if self.stopped.is_some() {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.stopped = Some(format!("node budget {} exhausted", self.budget));
            return Ok(());
        }
        let d = cs.len() as u32;
        let r = self.residual(cs)?;
        let next = d as u64 + 1;
        let divisible = next.is_multiple_of(self.p);
        if divisible && !(r[0].is_zero() && r[1].is_zero()) {
            return Ok(());
        }
        if d > self.best {
            self.best = d;
            self.witness = Some(cs.clone());
        }
        if d >= self.m_cap {
            self.stopped = Some(format!("reached the cap m = {}", self.m_cap));
            return Ok(());
        }
        let k = self.field.from_int((next % self.p) as i64);
        let a = [
            [self.m0[0][0].mul_ref(&k), self.m0[0][1].mul_ref(&k)],
            [self.m0[1][0].mul_ref(&k), self.m0[1][1].mul_ref(&k)],
        ];
        let b = [r[0].neg_ref(), r[1].neg_ref()];
        for c in self.solutions_mod_line(&a, &b, &cs[0])? {
            cs.push(c);
            self.dfs(cs)?;
            cs.pop();
            if self.stopped.is_some() {
                break;
            }
        }
        Ok(())
    }

    /// Solutions of `a c = b`, one per class modulo the span of `c1`.
    fn solutions_mod_line(&self, a: &[Vec2; 2], b: &Vec2, c1: &Vec2) -> Result<Vec<Vec2>> {
        let zero = self.zero();
        let det = a[0][0].mul_ref(&a[1][1]).sub_ref(&a[0][1].mul_ref(&a[1][0]));
        let (particular, kernel): (Vec2, Vec<Vec2>) = if !det.is_zero() {
            let di = det.inv()?;
            let c0 = a[1][1].mul_ref(&b[0]).sub_ref(&a[0][1].mul_ref(&b[1])).mul_ref(&di);
            let c1_ = a[0][0].mul_ref(&b[1]).sub_ref(&a[1][0].mul_ref(&b[0])).mul_ref(&di);
            ([c0, c1_], vec![])
        } else if a.iter().flatten().all(|x| x.is_zero()) {
            if !(b[0].is_zero() && b[1].is_zero()) {
                return Ok(vec![]);
            }
            let one = FqElem::one(&self.field);
            (
                [zero.clone(), zero.clone()],
                vec![[one.clone(), zero.clone()], [zero.clone(), one]],
            )
        } else {
            let (r, j) = (0..2)
                .flat_map(|r| (0..2).map(move |j| (r, j)))
                .find(|&(r, j)| !a[r][j].is_zero())
                .unwrap();
            let piv = a[r][j].inv()?;
            let lam = a[1 - r][j].mul_ref(&piv);
            if b[1 - r] != lam.mul_ref(&b[r]) {
                return Ok(vec![]);
            }
            let mut part = [zero.clone(), zero.clone()];
            part[j] = b[r].mul_ref(&piv);
            let mut kv = [zero.clone(), zero.clone()];
            kv[j] = a[r][1 - j].mul_ref(&piv).neg_ref();
            kv[1 - j] = FqElem::one(&self.field);
            (part, vec![kv])
        };
        let i0 = if c1[0].is_zero() { 1 } else { 0 };
        let i1 = 1 - i0;
        let c1_inv = c1[i0].inv()?;
        let proj = |v: &Vec2| v[i1].sub_ref(&v[i0].mul_ref(&c1_inv).mul_ref(&c1[i1]));
        let base = proj(&particular);
        let make = |t: FqElem| {
            let mut v = [zero.clone(), zero.clone()];
            v[i1] = t;
            v
        };
        if kernel.iter().any(|k| !proj(k).is_zero()) {
            Ok(self.elems.iter().map(|t| make(t.clone())).collect())
        } else {
            Ok(vec![make(base)])
        }
    }

    /// Projective points of the kernel of `m0`.
    fn first_directions(&self) -> Result<Vec<Vec2>> {
        let zero = self.zero();
        let one = FqElem::one(&self.field);
        let m = &self.m0;
        let rank0 = m.iter().flatten().all(|x| x.is_zero());
        if rank0 {
            let mut out: Vec<Vec2> = self.elems.iter().map(|t| [one.clone(), t.clone()]).collect();
            out.push([zero, one]);
            return Ok(out);
        }
        let det = m[0][0].mul_ref(&m[1][1]).sub_ref(&m[0][1].mul_ref(&m[1][0]));
        if !det.is_zero() {
            return Ok(vec![]);
        }
        let row = if m[0][0].is_zero() && m[0][1].is_zero() { &m[1] } else { &m[0] };
        // kernel of a nonzero row (a, b) is spanned by (-b, a)
        let v = [row[1].neg_ref(), row[0].clone()];
        let s = if v[0].is_zero() { v[1].inv()? } else { v[0].inv()? };
        Ok(vec![[v[0].mul_ref(&s), v[1].mul_ref(&s)]])
    }

    fn run(&mut self) -> Result<()> {
        for c1 in self.first_directions()? {
            let mut cs = vec![c1];
            self.dfs(&mut cs)?;
            if self.stopped.is_some() {
                break;
            }
        }
        Ok(())
    }
}

/// Largest order `m <= m_cap` of a closed-immersion jet at `x` integral for
/// both forms, over `F_{p^s}` for `s <= ext_cap`.
///
/// The forms and the point must be defined over the prime field.
pub fn max_jet_order(
    w1: &PolyOneForm<FqElem>,
    w2: &PolyOneForm<FqElem>,
    x: &[FqElem],
    cfg: &JetSearchConfig,
) -> Result<JetSearchReport> {
    let base = w1.f1.ctx().clone();
    if base.degree() != 1 || **w2.f1.ctx() != *base {
        return Err(Error::usage("forms must be defined over a common prime field"));
    }
    let p = base.characteristic();
    if x.len() != 2 || x.iter().any(|c| **c.field() != *base) {
        return Err(Error::usage("the point must have two coordinates in the prime field"));
    }
    if p < 3 || cfg.m_cap > 2 * (p as u32 - 2) {
        return Err(Error::usage(format!(
            "m_cap = {} exceeds the search window 2(p-2) = {}",
            cfg.m_cap,
            2 * (p.max(2) as i64 - 2)
        )));
    }
    if cfg.ext_cap == 0 || cfg.ext_cap > 2 {
        return Err(Error::usage("extension cap must be 1 or 2"));
    }
    let order = cfg.m_cap + 2;
    let local = |w: &PolyOneForm<FqElem>| PolyOneForm {
        f1: translate(&w.f1.with_order(order), x),
        f2: translate(&w.f2.with_order(order), x),
    };
    let (l1, l2) = (local(w1), local(w2));

    let mut per_field = Vec::new();
    let mut best: Option<(u32, u64, Vec<Vec2>, Arc<FiniteField>)> = None;
    let mut reason = None;
    for s in 1..=cfg.ext_cap {
        let field = if s == 1 { base.clone() } else { FiniteField::extension(p, s)? };
        let elems = field.enumerate()?;
        let forms = [&l1, &l2].map(|w| PolyOneForm {
            f1: embed_prime(&w.f1, &field),
            f2: embed_prime(&w.f2, &field),
        });
        let m0 = [0, 1].map(|i| [forms[i].f1.constant_term(), forms[i].f2.constant_term()]);
        let mut search = Search {
            field: field.clone(),
            p,
            forms,
            m0,
            elems: &elems,
            m_cap: cfg.m_cap,
            budget: cfg.node_budget,
            nodes: 0,
            best: 0,
            witness: None,
            stopped: None,
        };
        search.run()?;
        let reached = search.best;
        let m = match &search.stopped {
            Some(_) => JetOrder::AtLeast(reached),
            None => JetOrder::Exact(reached),
        };
        per_field.push(FieldResult {
            field_size: field.size(),
            m,
            nodes: search.nodes,
        });
        if best.as_ref().is_none_or(|b| reached > b.0) {
            best = Some((reached, field.size(), search.witness.clone().unwrap_or_default(), field.clone()));
        }
        if search.stopped.is_some() {
            reason = search.stopped.clone();
        }
    }
    let (m_best, field_size, wit, field) = best.expect("at least one field searched");
    let witness_jet = if wit.is_empty() {
        None
    } else {
        let c: Vec<Vec<FqElem>> = (0..2).map(|i| wit.iter().map(|v| v[i].clone()).collect()).collect();
        Some(JetMap::from_coeffs(&field, m_best, &c)?)
    };
    let m = if reason.is_some() {
        JetOrder::AtLeast(m_best)
    } else {
        JetOrder::Exact(m_best)
    };
    let mut checks = Vec::new();
    if let Some(j) = &witness_jet {
        let f = j.coords()[0].ctx().clone();
        let lifted = [&l1, &l2].map(|w| PolyOneForm {
            f1: embed_prime(&w.f1, &f),
            f2: embed_prime(&w.f2, &f),
        });
        let ok = is_integral(j, &lifted[0])? && is_integral(j, &lifted[1])? && j.is_closed_immersion();
        checks.push(Check::new(
            "witness_integral",
            ok,
            "witness is a closed immersion integral for both forms",
        ));
    }
    Ok(JetSearchReport {
        m,
        field_size,
        witness: witness_jet.as_ref().map(JetMapJson::from),
        witness_jet,
        per_field,
        reason,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(p: u64, a: &str, b: &str) -> (PolyOneForm<FqElem>, PolyOneForm<FqElem>, Vec<FqElem>) {
        let k = FiniteField::prime(p).unwrap();
        let w1 = PolyOneForm::parse(&k, 8, a).unwrap();
        let w2 = PolyOneForm::parse(&k, 8, b).unwrap();
        (w1, w2, vec![k.from_int(0), k.from_int(0)])
    }

    #[test]
    fn sharp_example_has_order_two() {
        for p in [5, 7, 11, 13] {
            let (w1, w2, x) = forms(p, "ds1 + (s1^2) ds2", "ds1 + (s2^2) ds2");
            let r = max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(6, 2)).unwrap();
            assert_eq!(r.m, JetOrder::Exact(2), "p = {p}");
            assert!(r.checks.iter().all(Check::passed));
            assert_eq!(r.witness.unwrap().coords, vec!["0".to_string(), "z".to_string()]);
        }
    }

    #[test]
    fn off_divisor_points_have_order_zero() {
        let (w1, w2, _) = forms(7, "ds1 + (s1^2) ds2", "ds1 + (s2^2) ds2");
        let k = FiniteField::prime(7).unwrap();
        let x = vec![k.from_int(1), k.from_int(2)];
        let r = max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(6, 1)).unwrap();
        assert_eq!(r.m, JetOrder::Exact(0));
        let (w1, w2, x) = forms(7, "ds1", "ds2");
        let r = max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(6, 2)).unwrap();
        assert_eq!(r.m, JetOrder::Exact(0));
    }

    #[test]
    fn translation() {
        let k = FiniteField::prime(7).unwrap();
        let f = TruncSeries::<FqElem>::parse_with(&k, &["s1", "s2"], 6, "s1^2 + s2").unwrap();
        let g = translate(&f, &[k.from_int(1), k.from_int(3)]);
        assert_eq!(g.to_text_with(&["s1", "s2"]), "4 + 2*s1 + s2 + s1^2");
    }

    #[test]
    fn cap_is_reported_as_lower_bound() {
        // both forms vanish along s2 = 0, so (z, 0) is integral at every order
        let (w1, w2, x) = forms(5, "(s2) ds1", "(s2) ds2");
        let r = max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(4, 1)).unwrap();
        assert_eq!(r.m, JetOrder::AtLeast(4));
        assert!(r.reason.unwrap().contains("cap"));
        assert!(max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(7, 1)).is_err());
    }
}
