use serde::Serialize;

use crate::error::{Error, Result};
use crate::fgroup::explog::ExpLog;
use crate::jetint::JetMap;
use crate::rings::{FiniteField, FqElem, PadicNum, Valuation};
use crate::scalar::{Field, Ring};
use crate::series::TruncSeries;

/// The line `z -> Exp(z u)` for a direction `u` with `max |u_j| = 1`.
#[derive(Debug, Clone)]
pub struct OneParamSubgroup {
    u: Vec<PadicNum>,
    h: Vec<TruncSeries<PadicNum>>,
    scaling: i64,
}

fn min_valuation(u: &[PadicNum]) -> Valuation {
    u.iter().map(PadicNum::valuation).min().unwrap_or(Valuation::Infinite)
}

#[derive(Debug, Clone, Serialize)]
pub struct OneParamJson {
    pub u: Vec<String>,
    pub scaling: i64,
    pub h: Vec<String>,
}

impl OneParamSubgroup {
    /// Fails unless `|u| = 1` exactly.
    pub fn new(el: &ExpLog<PadicNum>, u: Vec<PadicNum>) -> Result<Self> {
        if u.len() != el.dim() {
            return Err(Error::usage(format!(
                "direction has {} coordinates, the group has dimension {}",
                u.len(),
                el.dim()
            )));
        }
        if min_valuation(&u) != Valuation::Finite(0) {
            return Err(Error::usage(format!(
                "direction must have norm 1, found minimal valuation {:?}",
                min_valuation(&u)
            )));
        }
        let h = el
            .exp()
            .iter()
            .map(|e| e.restrict_to_line(&u))
            .collect::<Result<Vec<_>>>()?;
        Ok(OneParamSubgroup { u, h, scaling: 0 })
    }

    /// Rescales `u` by the power of `p` that makes its norm 1; the exponent
    /// used is kept in [`OneParamSubgroup::scaling`].
    pub fn normalized(el: &ExpLog<PadicNum>, u: Vec<PadicNum>) -> Result<Self> {
        let Valuation::Finite(v) = min_valuation(&u) else {
            return Err(Error::usage("direction is zero"));
        };
        let scaled: Vec<PadicNum> = u.iter().map(|x| x.shift(-v)).collect();
        let mut out = Self::new(el, scaled)?;
        out.scaling = -v;
        Ok(out)
    }

    pub fn u(&self) -> &[PadicNum] {
        &self.u
    }

    /// `u = p^scaling * (input direction)`.
    pub fn scaling(&self) -> i64 {
        self.scaling
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn order(&self) -> u32 {
        self.h[0].order()
    }

    /// `h_j(z) = Exp_j(z u)`.
    pub fn eval(&self) -> &[TruncSeries<PadicNum>] {
        &self.h
    }

    /// `P_{j,h}(u)`, the `z^h` coefficient of `h_j` (0-based `j`).
    pub fn coeff(&self, j: usize, h: u32) -> PadicNum {
        self.h[j].coeff(&[h])
    }

    pub fn to_json(&self) -> OneParamJson {
        OneParamJson {
            u: self.u.iter().map(Ring::to_text).collect(),
            scaling: self.scaling,
            h: self.h.iter().map(|s| s.to_text_with(&["z"])).collect(),
        }
    }

    /// Coordinatewise reduction of `h_j mod z^{m+1}` to `F_p`.
    pub fn reduce_jet_mod_p(&self, m: u32) -> Result<JetMap<FqElem>> {
        let padic = self.u[0].ctx();
        let p = padic.prime();
        if m as u64 >= p {
            return Err(Error::usage(format!(
                "jet order m = {m} must be below p = {p}: Exp has the denominator m! in degree m"
            )));
        }
        if m > self.order() {
            return Err(Error::usage(format!(
                "jet order {m} exceeds the truncation order {}",
                self.order()
            )));
        }
        let k = FiniteField::prime(p)?;
        let mut coords = Vec::with_capacity(self.dim());
        for (j, hj) in self.h.iter().enumerate() {
            let mut cs = Vec::with_capacity(m as usize);
            for h in 1..=m {
                let c = hj.coeff(&[h]);
                let r = c.residue().map_err(|e| {
                    Error::Precision(format!("P_{{{},{h}}}(u) = {c} has no residue: {e}", j + 1))
                })?;
                cs.push(k.from_int(r as i64));
            }
            coords.push(cs);
        }
        JetMap::from_coeffs(&k, m, &coords)
    }
}

/// The unit `eta` with `u' = eta u`, if there is one.
pub fn equiv(u: &[PadicNum], u2: &[PadicNum]) -> Result<Option<PadicNum>> {
    if u.len() != u2.len() {
        return Err(Error::usage("directions of different dimension"));
    }
    for w in [u, u2] {
        if min_valuation(w) != Valuation::Finite(0) {
            return Err(Error::usage("directions must have norm 1"));
        }
    }
    let i = u.iter().position(PadicNum::is_unit).expect("a unit coordinate exists");
    let eta = u2[i].div_ref(&u[i])?;
    if !eta.is_unit() {
        return Ok(None);
    }
    let same = u.iter().zip(u2).all(|(a, b)| eta.mul_ref(a) == *b);
    Ok(same.then_some(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgroup::FormalGroupLaw;
    use crate::rings::arith::rat;
    use crate::rings::Padic;

    #[test]
    fn additive_line() {
        let k = Padic::new(5, 10).unwrap();
        let g = FormalGroupLaw::<PadicNum>::additive(&k, 2, 4).unwrap();
        let el = ExpLog::new(&g).unwrap();
        let u = vec![k.from_int(&1.into()), k.exact_zero()];
        let sub = OneParamSubgroup::new(&el, u).unwrap();
        assert_eq!(sub.eval()[0].to_text_with(&["z"]), "z");
        assert!(sub.eval()[1].is_zero());
        let jet = sub.reduce_jet_mod_p(2).unwrap();
        assert_eq!(jet.coord_texts(), vec!["z", "0"]);
    }

    #[test]
    fn multiplicative_line_and_jet() {
        let k = Padic::new(5, 12).unwrap();
        let g = FormalGroupLaw::<PadicNum>::multiplicative(&k, 6);
        let el = ExpLog::new(&g).unwrap();
        let sub = OneParamSubgroup::new(&el, vec![k.from_int(&1.into())]).unwrap();
        assert_eq!(sub.coeff(0, 3), k.from_rational(&rat(1, 6)));
        let jet = sub.reduce_jet_mod_p(3).unwrap();
        assert_eq!(jet.coord_texts(), vec!["z + 3*z^2 + z^3"]);
        assert!(jet.is_closed_immersion());
        assert_eq!(sub.reduce_jet_mod_p(4).unwrap().coord_texts(), vec!["z + 3*z^2 + z^3 + 4*z^4"]);
        assert!(matches!(sub.reduce_jet_mod_p(5), Err(Error::Usage(_))));
    }

    #[test]
    fn normalisation_and_equivalence() {
        let k = Padic::new(5, 10).unwrap();
        let g = FormalGroupLaw::<PadicNum>::additive(&k, 2, 3).unwrap();
        let el = ExpLog::new(&g).unwrap();
        let q = |a, b| k.from_rational(&rat(a, b));
        assert!(OneParamSubgroup::new(&el, vec![q(5, 1), q(25, 1)]).is_err());
        let sub = OneParamSubgroup::normalized(&el, vec![q(5, 1), q(25, 1)]).unwrap();
        assert_eq!(sub.scaling(), -1);
        assert_eq!(sub.u()[0], q(1, 1));

        let eta = equiv(&[q(1, 1), q(5, 1)], &[q(2, 1), q(10, 1)]).unwrap();
        assert_eq!(eta, Some(q(2, 1)));
        assert_eq!(equiv(&[q(1, 1), q(5, 1)], &[q(1, 1), q(1, 1)]).unwrap(), None);
        assert!(equiv(&[q(5, 1)], &[q(1, 1)]).is_err());
    }
}
