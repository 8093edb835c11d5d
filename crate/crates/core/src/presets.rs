//! Named worked examples, invocable from the command line.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fgroup::{ExpLog, FormalGroupLaw, OneParamSubgroup, Weierstrass};
use crate::jetint::{ord_on_branch, BranchRecord};
use crate::rings::arith::rat_int;
use crate::rings::{FiniteField, FqElem, Padic, PadicNum};
use crate::scalar::Ring;
use crate::series::{PolyOneForm, TruncSeries};

pub const NAMES: [&str; 5] = [
    "rmk-sharp",
    "multiplicative-group",
    "nodal-cubic",
    "sym2-genus3",
    "product-elliptic",
];

/// Two forms on the plane whose wedge vanishes on `s1 = s2` and `s1 = -s2`.
pub struct JetPreset {
    pub omega1: &'static str,
    pub omega2: &'static str,
    pub point: [i64; 2],
    /// Parametrizations of the divisor branches through the point.
    pub branches: [[&'static str; 2]; 2],
}

pub const RMK_SHARP: JetPreset = JetPreset {
    omega1: "ds1 + (s1^2) ds2",
    omega2: "ds1 + (s2^2) ds2",
    point: [0, 0],
    branches: [["t", "t"], ["t", "-t"]],
};

impl JetPreset {
    pub fn forms(&self, k: &Arc<FiniteField>, order: u32) -> Result<(PolyOneForm<FqElem>, PolyOneForm<FqElem>)> {
        Ok((
            PolyOneForm::parse(k, order, self.omega1)?,
            PolyOneForm::parse(k, order, self.omega2)?,
        ))
    }

    pub fn point(&self, k: &Arc<FiniteField>) -> Vec<FqElem> {
        self.point.iter().map(|&c| k.from_int(c)).collect()
    }

    /// Branch records of the divisor at the point, with `omega1` as the
    /// reference form.
    pub fn branch_records(&self, k: &Arc<FiniteField>, order: u32) -> Result<Vec<BranchRecord>> {
        let (w0, _) = self.forms(k, order)?;
        self.branches
            .iter()
            .map(|[a, b]| {
                let phi1 = TruncSeries::parse_with(k, &["t"], order, a)?;
                let phi2 = TruncSeries::parse_with(k, &["t"], order, b)?;
                Ok(BranchRecord {
                    a: 1,
                    gg: 0,
                    param: Some((a.to_string(), b.to_string())),
                    ord_w0: ord_on_branch(&phi1, &phi2, &w0)?,
                })
            })
            .collect()
    }
}

pub const PRODUCT_CURVES: [[i64; 5]; 3] = [[0, 0, 1, 0, 0], [0, 0, 0, -1, 0], [1, -1, 1, 0, 0]];
pub const PRODUCT_PRIME: u64 = 7;

/// `E1 x E2 x E3` at `p = 7`; the surface is `E1 x E2 x {0}`, cut out by the
/// third coordinate.
pub struct ProductElliptic {
    pub p: u64,
    pub expl: ExpLog<PadicNum>,
    pub ctx: Arc<Padic>,
}

pub const PRODUCT_EQ_INDEX: usize = 3;

impl ProductElliptic {
    pub fn new(order: u32, prec: u32) -> Result<Self> {
        let p = PRODUCT_PRIME;
        let ctx = Padic::new(p, prec)?;
        let curve = |a: [i64; 5]| -> Result<FormalGroupLaw<PadicNum>> {
            let w: Weierstrass = a.map(rat_int);
            FormalGroupLaw::elliptic(&ctx, &w, order, Some(p))
        };
        let [a, b, c] = PRODUCT_CURVES;
        let g = FormalGroupLaw::product(&FormalGroupLaw::product(&curve(a)?, &curve(b)?), &curve(c)?);
        let expl = ExpLog::new(&g)?;
        Ok(ProductElliptic { p, expl, ctx })
    }

    pub fn direction(&self, u: [i64; 3]) -> Result<OneParamSubgroup> {
        let u = u.iter().map(|&c| self.ctx.from_int(&c.into())).collect();
        OneParamSubgroup::normalized(&self.expl, u)
    }
}

/// Largest `m < p` for which the reduced jet of `z -> Exp(z u)` stays on the
/// subvariety `{x_j = 0}`, i.e. `P_{j,h}(u) = 0 mod p` for `h <= m`.
pub fn coordinate_jet_order(sub: &OneParamSubgroup, j: usize) -> Result<u32> {
    if j == 0 || j > sub.dim() {
        return Err(Error::usage(format!("coordinate index {j} outside 1..={}", sub.dim())));
    }
    let p = sub.u()[0].prime();
    let top = sub.order().min((p - 1) as u32);
    let jet = sub.reduce_jet_mod_p(top)?;
    let c = &jet.coords()[j - 1];
    Ok((1..=top).find(|&h| !c.coeff(&[h]).is_zero()).map_or(top, |h| h - 1))
}

pub const SYM2_GENUS: u32 = 3;
pub const SYM2_PRIME: u64 = 521;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgroup::disk_bound;
    use crate::jetint::overdetermined_bound;
    use crate::rings::LocalFieldParams;

    #[test]
    fn sharp_branches_give_two() {
        for p in [5, 7, 11, 13] {
            let k = FiniteField::prime(p).unwrap();
            let rec = RMK_SHARP.branch_records(&k, 8).unwrap();
            assert_eq!(overdetermined_bound(&rec).unwrap(), 2);
        }
    }

    #[test]
    fn product_link() {
        let pe = ProductElliptic::new(6, 12).unwrap();
        let params = LocalFieldParams::unramified(7).unwrap();
        let sub = pe.direction([1, 1, 1]).unwrap();
        let m = coordinate_jet_order(&sub, PRODUCT_EQ_INDEX).unwrap();
        assert_eq!(m, 0);
        let r = disk_bound(&sub, &[PRODUCT_EQ_INDEX], &params, Some(m)).unwrap();
        assert_eq!(r.n, 1);
        let flat = pe.direction([1, 1, 7]).unwrap();
        assert!(coordinate_jet_order(&flat, PRODUCT_EQ_INDEX).unwrap() >= 1);
        assert!(matches!(
            disk_bound(&flat, &[PRODUCT_EQ_INDEX], &params, None),
            Err(Error::Inconclusive(_))
        ));
    }
}
