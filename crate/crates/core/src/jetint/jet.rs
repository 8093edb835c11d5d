use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Ring;
use crate::series::{jetring_reduce, JetRingForm, PolyOneForm, TruncSeries};

/// Morphism `Spec k[z]/(z^{m+1}) -> chart`, given by coordinate polynomials
/// without constant term.
#[derive(Clone, PartialEq)]
pub struct JetMap<S: Ring> {
    m: u32,
    coords: Vec<TruncSeries<S>>,
}

impl<S: Ring> fmt::Debug for JetMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) mod z^{}", self.coord_texts().join(", "), self.m + 1)
    }
}

impl<S: Ring> JetMap<S> {
    pub fn new(m: u32, coords: Vec<TruncSeries<S>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::usage("a jet needs at least one coordinate"));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.nvars() != 1 {
                return Err(Error::usage(format!("coordinate {} is not a series in z", i + 1)));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::usage(format!("coordinate {} has a constant term", i + 1)));
            }
        }
        let coords = coords.into_iter().map(|c| c.with_order(m)).collect();
        Ok(JetMap { m, coords })
    }

    /// Jet from coefficient lists `[c_1, c_2, ...]` of each coordinate.
    pub fn from_coeffs(ctx: &S::Ctx, m: u32, coeffs: &[Vec<S>]) -> Result<Self> {
        let coords = coeffs
            .iter()
            .map(|cs| {
                let mut s = TruncSeries::zero(ctx, 1, m);
                for (k, c) in cs.iter().enumerate() {
                    s.add_term(vec![k as u32 + 1], c.clone());
                }
                s
            })
            .collect();
        Self::new(m, coords)
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn coords(&self) -> &[TruncSeries<S>] {
        &self.coords
    }

    /// Some coordinate has a nonzero linear term.
    pub fn is_closed_immersion(&self) -> bool {
        self.m >= 1 && self.coords.iter().any(|c| !c.coeff(&[1]).is_zero())
    }

    pub fn coord_texts(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_text_with(&["z"])).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JetMapJson {
    pub m: u32,
    pub coords: Vec<String>,
    pub closed_immersion: bool,
}

impl<S: Ring> From<&JetMap<S>> for JetMapJson {
    fn from(j: &JetMap<S>) -> Self {
        JetMapJson {
            m: j.m,
            coords: j.coord_texts(),
            closed_immersion: j.is_closed_immersion(),
        }
    }
}

/// `g(z) dz = phi^*(omega)` in the differentials of the jet ring. The form's
/// coefficients are read as polynomials.
pub fn pullback_form<S: Ring>(phi: &JetMap<S>, omega: &PolyOneForm<S>) -> Result<JetRingForm<S>> {
    if phi.coords.len() != 2 {
        return Err(Error::usage("the chart is two-dimensional; the jet needs two coordinates"));
    }
    if phi.coords[0].ctx() != omega.f1.ctx() {
        return Err(Error::usage("jet and form are defined over different rings"));
    }
    let m = phi.m;
    let ctx = omega.f1.ctx().clone();
    let lift = |c: &TruncSeries<S>| c.with_order(m + 1);
    let w = PolyOneForm {
        f1: omega.f1.with_order(m + 1),
        f2: omega.f2.with_order(m + 1),
    };
    let g = w.pullback(&lift(&phi.coords[0]), &lift(&phi.coords[1]))?;
    let coeffs: Vec<S> = (0..=m).map(|k| g.coeff(&[k])).collect();
    Ok(jetring_reduce(&ctx, &coeffs, m))
}

pub fn is_integral<S: Ring>(phi: &JetMap<S>, omega: &PolyOneForm<S>) -> Result<bool> {
    Ok(pullback_form(phi, omega)?.is_zero())
}

/// Order of vanishing in `t`, or a lower bound when the pullback is zero to
/// the available precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchOrder {
    Finite(u32),
    AtLeast(u32),
}

/// `ord_t(f1(phi) phi1' + f2(phi) phi2')` along a parametrized branch.
pub fn ord_on_branch<S: Ring>(
    phi1: &TruncSeries<S>,
    phi2: &TruncSeries<S>,
    omega: &PolyOneForm<S>,
) -> Result<BranchOrder> {
    if phi1.nvars() != 1 || phi2.nvars() != 1 {
        return Err(Error::usage("branch parametrization must be series in one variable"));
    }
    let tb = phi1.order().min(phi2.order());
    let w = PolyOneForm {
        f1: omega.f1.with_order(tb),
        f2: omega.f2.with_order(tb),
    };
    let g = w.pullback(&phi1.with_order(tb), &phi2.with_order(tb))?;
    Ok(match g.min_degree() {
        Some(d) => BranchOrder::Finite(d),
        None => BranchOrder::AtLeast(tb),
    })
}

/// One branch of one component of the divisor through the point.
#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    /// Multiplicity of the component.
    pub a: u32,
    /// Geometric genus of the component.
    pub gg: u32,
    pub param: Option<(String, String)>,
    pub ord_w0: BranchOrder,
}

/// `sum a (ord + 1)` over every branch through the point.
pub fn overdetermined_bound(branches: &[BranchRecord]) -> Result<u64> {
    let mut total = 0u64;
    for (i, b) in branches.iter().enumerate() {
        if b.a == 0 {
            return Err(Error::usage(format!("branch {} has multiplicity 0", i + 1)));
        }
        match b.ord_w0 {
            BranchOrder::Finite(o) => total += b.a as u64 * (o as u64 + 1),
            BranchOrder::AtLeast(t) => {
                return Err(Error::usage(format!(
                    "branch {} is omega0-integral to order {t}: the reference form must be chosen so that no branch map is omega0-integral",
                    i + 1
                )))
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{FiniteField, FqElem};

    type F = TruncSeries<FqElem>;

    fn form(p: u64, s: &str) -> PolyOneForm<FqElem> {
        PolyOneForm::parse(&FiniteField::prime(p).unwrap(), 8, s).unwrap()
    }

    fn jet(p: u64, m: u32, c1: &[i64], c2: &[i64]) -> JetMap<FqElem> {
        let k = FiniteField::prime(p).unwrap();
        let v = |c: &[i64]| c.iter().map(|&x| k.from_int(x)).collect::<Vec<_>>();
        JetMap::from_coeffs(&k, m, &[v(c1), v(c2)]).unwrap()
    }

    #[test]
    fn pullback_examples() {
        let phi = jet(5, 2, &[1], &[]);
        let g = pullback_form(&phi, &form(5, "ds1 + (s1^2) ds2")).unwrap();
        assert!(!g.is_zero());
        assert!(is_integral(&phi, &form(5, "(s2) ds1 + (s1^3) ds2")).unwrap());
        let swapped = jet(5, 2, &[], &[1]);
        assert!(is_integral(&swapped, &form(5, "ds1 + (s1^2) ds2")).unwrap());
        assert!(is_integral(&swapped, &form(5, "ds1 + (s2^2) ds2")).unwrap());
        assert!(swapped.is_closed_immersion());
        assert!(!jet(5, 2, &[0, 1], &[]).is_closed_immersion());
    }

    #[test]
    fn branch_orders() {
        let k = FiniteField::prime(7).unwrap();
        let t = F::var(&k, 1, 10, 0);
        let w = form(7, "ds1 + (s1^2) ds2");
        assert_eq!(ord_on_branch(&t, &t, &w).unwrap(), BranchOrder::Finite(0));
        let cusp = ord_on_branch(&t.pow(2), &t.pow(3), &form(7, "(s1) ds1")).unwrap();
        assert_eq!(cusp, BranchOrder::Finite(3));
        let zero = F::zero(&k, 1, 10);
        assert_eq!(
            ord_on_branch(&t, &zero, &form(7, "(s2) ds1")).unwrap(),
            BranchOrder::AtLeast(10)
        );
    }

    #[test]
    fn overdetermined_sums() {
        let b = |a, o| BranchRecord {
            a,
            gg: 0,
            param: None,
            ord_w0: BranchOrder::Finite(o),
        };
        assert_eq!(overdetermined_bound(&[b(1, 0), b(1, 0)]).unwrap(), 2);
        assert_eq!(overdetermined_bound(&[]).unwrap(), 0);
        assert_eq!(overdetermined_bound(&[b(3, 1)]).unwrap(), 6);
        let bad = BranchRecord {
            ord_w0: BranchOrder::AtLeast(8),
            ..b(1, 0)
        };
        assert!(matches!(overdetermined_bound(&[bad]), Err(Error::Usage(_))));
    }
}
