use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fgroup::onepar::OneParamSubgroup;
use crate::report::Check;
use crate::rings::{LocalFieldParams, Valuation};
use crate::zeroest::{disk_formula, jet_formula};

#[derive(Debug, Clone, Serialize)]
pub struct DiskBoundReport {
    /// Minimal degree with a unit coefficient among the local equations.
    pub n: u32,
    /// Witnessing coordinate, 1-based.
    pub j0: usize,
    #[serde(serialize_with = "crate::report::as_string")]
    pub lambda: BigRational,
    #[serde(serialize_with = "crate::report::as_string")]
    pub bound_real: BigRational,
    #[serde(serialize_with = "crate::report::as_string")]
    pub bound_floor: BigInt,
    /// `1 + m/(1 - lambda)` when a jet order `m` is supplied.
    #[serde(serialize_with = "opt_string")]
    pub jet_bound: Option<BigRational>,
    pub checks: Vec<Check>,
}

fn opt_string<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

/// Bound on the number of points of the residue disk on the subvariety cut
/// out by the coordinates `eq_indices` (1-based) along the line `Exp(z u)`.
pub fn disk_bound(
    sub: &OneParamSubgroup,
    eq_indices: &[usize],
    params: &LocalFieldParams,
    jet_link: Option<u32>,
) -> Result<DiskBoundReport> {
    if eq_indices.is_empty() {
        return Err(Error::usage("at least one local equation index is required"));
    }
    if let Some(&j) = eq_indices.iter().find(|&&j| j == 0 || j > sub.dim()) {
        return Err(Error::usage(format!(
            "equation index {j} outside 1..={}",
            sub.dim()
        )));
    }
    let p = sub.u()[0].prime();
    if params.p != p {
        return Err(Error::usage(format!(
            "local field over Q_{} but the group is over Q_{p}",
            params.p
        )));
    }
    if !params.ramification_guard() {
        return Err(Error::hypothesis(
            "p_large",
            format!("p = {p} does not exceed max(e + 1, exp(e / exp(1))) for e = {}", params.e),
        ));
    }
    let lambda = params.lambda();
    let top = sub.order().min(p.saturating_sub(2).min(u32::MAX as u64) as u32);
    let mut found = None;
    'search: for n in 1..=top {
        for &j in eq_indices {
            if sub.coeff(j - 1, n).valuation() <= Valuation::Finite(0) {
                found = Some((n, j));
                break 'search;
            }
        }
    }
    let Some((n, j0)) = found else {
        return Err(Error::Inconclusive(format!(
            "no coefficient P_{{j,h}}(u) of norm 1 for h <= {top} and j in {eq_indices:?}; the direction may be degenerate"
        )));
    };
    let (bound_real, bound_floor) = disk_formula(n, &lambda)?;
    let mut checks = vec![Check::new(
        "minimal_witness",
        (1..n).all(|h| eq_indices.iter().all(|&j| sub.coeff(j - 1, h).valuation() > Valuation::Finite(0))),
        format!("|P_{{j,h}}(u)| < 1 for h < {n}"),
    )];
    let jet_bound = match jet_link {
        Some(m) => {
            checks.push(Check::new(
                "witness_below_jet_order",
                n <= m + 1,
                format!("N = {n} <= m + 1 = {}", m + 1),
            ));
            Some(jet_formula(m, &lambda)?)
        }
        None => None,
    };
    Ok(DiskBoundReport {
        n,
        j0,
        lambda,
        bound_real,
        bound_floor,
        jet_bound,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgroup::{ExpLog, FormalGroupLaw};
    use crate::rings::arith::{rat, rat_int};
    use crate::rings::{Padic, PadicNum};

    fn product3(k: &std::sync::Arc<Padic>, t: u32) -> FormalGroupLaw<PadicNum> {
        let e = |a: [i64; 5]| FormalGroupLaw::<PadicNum>::elliptic(k, &a.map(rat_int), t, Some(7)).unwrap();
        let g12 = FormalGroupLaw::product(&e([0, 0, 1, 0, 0]), &e([0, 0, 0, -1, 0]));
        FormalGroupLaw::product(&g12, &e([1, -1, 1, 0, 0]))
    }

    #[test]
    fn product_of_three_curves() {
        let k = Padic::new(7, 10).unwrap();
        let el = ExpLog::new(&product3(&k, 5)).unwrap();
        let one = k.from_int(&1.into());
        let params = LocalFieldParams::unramified(7).unwrap();
        let sub = OneParamSubgroup::new(&el, vec![one.clone(), one.clone(), one.clone()]).unwrap();
        let r = disk_bound(&sub, &[3], &params, Some(0)).unwrap();
        assert_eq!((r.n, r.j0), (1, 3));
        assert_eq!(r.bound_real, rat_int(1));
        assert!(r.checks.iter().all(Check::passed));

        let flat = OneParamSubgroup::new(&el, vec![one.clone(), one, k.exact_zero()]).unwrap();
        assert!(matches!(disk_bound(&flat, &[3], &params, None), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn formula_for_n_three() {
        let lambda = LocalFieldParams::unramified(7).unwrap().lambda();
        let (b, f) = disk_formula(3, &lambda).unwrap();
        assert_eq!(b, rat(17, 5));
        assert_eq!(f, 3.into());
    }

    #[test]
    fn guard_failure_is_a_hypothesis_error() {
        let k = Padic::new(3, 8).unwrap();
        let g = FormalGroupLaw::<PadicNum>::multiplicative(&k, 4);
        let el = ExpLog::new(&g).unwrap();
        let sub = OneParamSubgroup::new(&el, vec![k.from_int(&1.into())]).unwrap();
        let params = LocalFieldParams::new(3, 2, 1).unwrap();
        assert!(matches!(disk_bound(&sub, &[1], &params, None), Err(Error::Hypothesis { .. })));
    }
}
