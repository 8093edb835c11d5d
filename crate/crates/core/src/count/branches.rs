use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::count::variety::{Ambient, Variety};
use crate::error::{Error, Result};
use crate::report::Check;
use crate::rings::{Embedding, FiniteField, FqElem, QuadSurd};
use crate::scalar::{Field, Ring};
use crate::series::TruncSeries;

/// Largest truncation used for exact (polynomial) branch parametrizations.
pub const DEFAULT_BRANCH_ORDER: u32 = 48;

/// One singular point as supplied in a branch file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFileEntry {
    /// Coordinates over `F_{q^field_ext}`.
    pub point: Vec<String>,
    /// Per branch, the local coordinates as series in `t`.
    pub params: Vec<Vec<String>>,
    #[serde(default = "one")]
    pub field_ext: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub delta: u32,
    pub r_local: usize,
    /// `sum_i min_j ord_t(phi_ij)`.
    pub mult: u32,
    /// Truncation at which `delta` was read off.
    pub t_b: u32,
    pub checks: Vec<Check>,
}

fn ord(s: &TruncSeries<FqElem>) -> Option<u32> {
    s.min_degree()
}

/// Row-echelon basis over a finite field; returns the rank after inserting.
struct Echelon {
    rows: Vec<(usize, Vec<FqElem>)>,
}

impl Echelon {
    fn insert(&mut self, mut v: Vec<FqElem>) {
        for (piv, row) in &self.rows {
            if !v[*piv].is_zero() {
                let c = v[*piv].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.sub_ref(&c.mul_ref(r));
                }
            }
        }
        if let Some(piv) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[piv].inv().expect("nonzero pivot");
            let v: Vec<FqElem> = v.iter().map(|x| x.mul_ref(&inv)).collect();
            for (_, row) in self.rows.iter_mut() {
                if !row[piv].is_zero() {
                    let c = row[piv].clone();
                    for (x, r) in row.iter_mut().zip(&v) {
                        *x = x.sub_ref(&c.mul_ref(r));
                    }
                }
            }
            self.rows.push((piv, v));
        }
    }
}

/// `r T - dim` of the image of `k[x_1..x_k]` in `(k[t]/t^T)^r`.
fn delta_at(branches: &[Vec<TruncSeries<FqElem>>], t: u32) -> u32 {
    let k = branches[0][0].ctx().clone();
    let nc = branches[0].len();
    let r = branches.len();
    let len = r * t as usize;
    let cut: Vec<Vec<TruncSeries<FqElem>>> = branches
        .iter()
        .map(|b| b.iter().map(|c| c.with_order(t - 1)).collect())
        .collect();
    let mut basis = Echelon { rows: Vec::new() };
    // monomials of degree < t, generated degree by degree
    let mut layer: Vec<(Vec<u32>, Vec<TruncSeries<FqElem>>)> =
        vec![(vec![0; nc], (0..r).map(|_| TruncSeries::one(&k, 1, t - 1)).collect())];
    for _deg in 0..t {
        let mut next: HashMap<Vec<u32>, Vec<TruncSeries<FqElem>>> = HashMap::new();
        for (e, vals) in &layer {
            let mut v = Vec::with_capacity(len);
            for s in vals {
                v.extend((0..t).map(|j| s.coeff(&[j])));
            }
            basis.insert(v);
            if basis.rows.len() == len {
                return 0;
            }
            for j in 0..nc {
                let mut e2 = e.clone();
                e2[j] += 1;
                next.entry(e2).or_insert_with(|| {
                    vals.iter().zip(&cut).map(|(s, b)| s.mul(&b[j])).collect()
                });
            }
        }
        layer = next.into_iter().filter(|(_, v)| v.iter().any(|s| !s.is_zero())).collect();
        layer.sort_by(|a, b| a.0.cmp(&b.0));
        if layer.is_empty() {
            break;
        }
    }
    (len - basis.rows.len()) as u32
}

/// `delta = dim (prod_i k[[t]]) / O` from branch parametrizations, read off
/// once it is stable over three consecutive truncations `T >= 2 delta`.
pub fn delta_invariant(branches: &[Vec<TruncSeries<FqElem>>], t_cap: u32) -> Result<DeltaReport> {
    if branches.is_empty() {
        return Err(Error::usage("at least one branch is required"));
    }
    let nc = branches[0].len();
    for (i, b) in branches.iter().enumerate() {
        if b.len() != nc || nc == 0 {
            return Err(Error::usage(format!("branch {} has {} coordinates, expected {nc}", i + 1, b.len())));
        }
        if b.iter().any(|c| c.nvars() != 1 || !c.constant_term().is_zero()) {
            return Err(Error::usage(format!(
                "branch {} must be series in t without constant term",
                i + 1
            )));
        }
        if b.iter().all(|c| c.is_zero()) {
            return Err(Error::usage(format!("branch {} is constant", i + 1)));
        }
    }
    let mut memo = HashMap::new();
    let mut at = |t: u32| *memo.entry(t).or_insert_with(|| delta_at(branches, t));
    let mut found = None;
    for t in 1..=t_cap.saturating_sub(2) {
        let d = at(t);
        if t >= 2 * d && at(t + 1) == d && at(t + 2) == d {
            found = Some((t, d));
            break;
        }
    }
    let Some((t_b, delta)) = found else {
        return Err(Error::Inconclusive(format!(
            "delta did not stabilize below the truncation cap {t_cap}"
        )));
    };
    let r_local = branches.len();
    let mult: u32 = branches
        .iter()
        .map(|b| b.iter().filter_map(ord).min().unwrap_or(0))
        .sum();
    let mut checks = vec![
        Check::new("smooth_iff_delta_zero", (delta == 0) == (r_local == 1 && mult == 1), format!("delta = {delta}, r = {r_local}, mult = {mult}")),
        Check::new("branch_count", r_local as u32 <= delta + 1, format!("r = {r_local} <= delta + 1 = {}", delta + 1)),
    ];
    if nc == 2 {
        checks.push(Check::new(
            "multiplicity_bound",
            2 * delta >= mult * mult.saturating_sub(1),
            format!("delta = {delta} >= mult (mult - 1) / 2 with mult = {mult}"),
        ));
    }
    Ok(DeltaReport {
        delta,
        r_local,
        mult,
        t_b,
        checks,
    })
}

/// `sum g_j + sum delta - r + 1`.
pub fn genus_bookkeeping(genera: &[u32], deltas: &[u32]) -> i64 {
    let g: i64 = genera.iter().map(|&g| g as i64).sum();
    let d: i64 = deltas.iter().map(|&d| d as i64).sum();
    g + d - genera.len() as i64 + 1
}

/// Normalizes a projective point so that its first nonzero coordinate is 1.
fn normalize(pt: &[FqElem]) -> Result<Vec<FqElem>> {
    let lead = pt
        .iter()
        .find(|c| !c.is_zero())
        .ok_or_else(|| Error::usage("the zero vector is not a projective point"))?
        .inv()?;
    Ok(pt.iter().map(|c| c.mul_ref(&lead)).collect())
}

fn fixed_by(x: &FqElem, qk: u64) -> bool {
    x.pow(qk) == *x
}

#[derive(Debug, Clone)]
pub struct SingularPointData {
    field: Arc<FiniteField>,
    q: u64,
    field_ext: u32,
    point: Vec<FqElem>,
    branches: Vec<Vec<TruncSeries<FqElem>>>,
    /// Size of the orbit of the point under `x -> x^q`.
    orbit: u32,
    pub delta: DeltaReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularPointJson {
    pub point: Vec<String>,
    pub field_ext: u32,
    pub orbit: u32,
    pub params: Vec<Vec<String>>,
    pub delta: DeltaReport,
}

impl SingularPointData {
    pub fn from_entry(v: &Variety, e: &BranchFileEntry) -> Result<Self> {
        if v.polys().len() != 1 || v.ambient().dim() != 2 {
            return Err(Error::usage("branch data is supported for plane curves given by one polynomial"));
        }
        let d = e.field_ext.max(1);
        let k = v.field(d)?;
        let nvars = v.ambient().nvars();
        if e.point.len() != nvars {
            return Err(Error::usage(format!(
                "point {:?} needs {nvars} coordinates",
                e.point
            )));
        }
        let raw = e
            .point
            .iter()
            .map(|c| FqElem::parse_text(&k, c))
            .collect::<Result<Vec<_>>>()?;
        let projective = matches!(v.ambient(), Ambient::Projective(_));
        let point = if projective { normalize(&raw)? } else { raw };
        // chart: last nonzero coordinate set to 1
        let (chart, base): (Option<usize>, Vec<FqElem>) = if projective {
            let c = point.iter().rposition(|x| !x.is_zero()).unwrap();
            let inv = point[c].inv()?;
            (Some(c), point.iter().map(|x| x.mul_ref(&inv)).collect())
        } else {
            (None, point.clone())
        };
        let local_vars: Vec<usize> = (0..nvars).filter(|&i| Some(i) != chart).collect();
        let mut max_deg = 0;
        let mut branches = Vec::new();
        for (bi, param) in e.params.iter().enumerate() {
            if param.len() != local_vars.len() {
                return Err(Error::usage(format!(
                    "branch {} at {:?} needs {} coordinates",
                    bi + 1,
                    e.point,
                    local_vars.len()
                )));
            }
            let coords = param
                .iter()
                .map(|s| TruncSeries::parse_with(&k, &["t"], DEFAULT_BRANCH_ORDER, s))
                .collect::<Result<Vec<_>>>()?;
            max_deg = max_deg.max(coords.iter().filter_map(|c| c.terms().map(|(e, _)| e[0]).max()).max().unwrap_or(0));
            branches.push(coords);
        }
        // evaluate the curve along each branch
        let f = &v.polys()[0];
        let mut exact = true;
        for (bi, b) in branches.iter().enumerate() {
            let mut subs = Vec::with_capacity(nvars);
            let mut it = b.iter();
            for (i, x0) in base.iter().enumerate() {
                let c = TruncSeries::constant(&k, 1, DEFAULT_BRANCH_ORDER, x0.clone());
                subs.push(if Some(i) == chart { c } else { c.add(it.next().unwrap()) });
            }
            let g = f.eval_series(&k, &subs);
            match g.min_degree() {
                None => {}
                Some(o) if o > max_deg => exact = false,
                Some(o) => {
                    return Err(Error::usage(format!(
                        "branch {} at {:?} leaves the curve: F(phi(t)) has order {o} <= {max_deg}",
                        bi + 1,
                        e.point
                    )))
                }
            }
        }
        let t_cap = if exact { DEFAULT_BRANCH_ORDER } else { max_deg + 1 };
        let branches: Vec<Vec<TruncSeries<FqElem>>> = branches
            .into_iter()
            .map(|b| b.into_iter().map(|c| c.with_order(t_cap)).collect())
            .collect();
        let delta = delta_invariant(&branches, t_cap)?;
        let q = v.q();
        let orbit = (1..=d)
            .find(|&j| d.is_multiple_of(j) && point.iter().all(|x| fixed_by(x, q.pow(j))))
            .unwrap();
        Ok(SingularPointData {
            field: k,
            q,
            field_ext: d,
            point,
            branches,
            orbit,
            delta,
        })
    }

    pub fn r_local(&self) -> usize {
        self.branches.len()
    }

    pub fn orbit(&self) -> u32 {
        self.orbit
    }

    pub fn point(&self) -> &[FqElem] {
        &self.point
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn is_rational_over(&self, n: u32) -> bool {
        n.is_multiple_of(self.orbit)
    }

    /// Branches whose coefficients lie in `F_{q^n}`.
    pub fn rational_branches(&self, n: u32) -> usize {
        let g = gcd(n, self.field_ext);
        let qg = self.q.pow(g);
        self.branches
            .iter()
            .filter(|b| b.iter().all(|c| c.terms().all(|(_, x)| fixed_by(x, qg))))
            .count()
    }

    pub fn to_json(&self) -> SingularPointJson {
        SingularPointJson {
            point: self.point.iter().map(Ring::to_text).collect(),
            field_ext: self.field_ext,
            orbit: self.orbit,
            params: self
                .branches
                .iter()
                .map(|b| b.iter().map(|c| c.to_text_with(&["t"])).collect())
                .collect(),
            delta: self.delta.clone(),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A plane curve together with branch data at every singular point.
#[derive(Debug, Clone)]
pub struct SingularCurve {
    variety: Variety,
    points: Vec<SingularPointData>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdCount {
    pub n: u32,
    pub points: u64,
    pub correction: i64,
    pub a_d: i64,
}

impl SingularCurve {
    /// Validates the branch data against a Jacobian scan over `F_q` and
    /// `F_{q^2}`.
    pub fn new(variety: Variety, entries: &[BranchFileEntry]) -> Result<Self> {
        let points = entries
            .iter()
            .map(|e| SingularPointData::from_entry(&variety, e))
            .collect::<Result<Vec<_>>>()?;
        let f = &variety.polys()[0];
        for (sp, e) in points.iter().zip(entries) {
            let mut system = vec![f.clone()];
            system.extend((0..variety.ambient().nvars()).map(|i| f.derivative(i)));
            if !system.iter().all(|g| g.eval(sp.point()).is_zero()) {
                return Err(Error::usage(format!("{:?} is not a singular point of the curve", e.point)));
            }
        }
        let big = variety.field(2)?;
        let q = variety.q();
        let frob = |pt: &[FqElem]| pt.iter().map(|x| x.pow(q)).collect::<Vec<_>>();
        let mut embedded: Vec<Vec<FqElem>> = Vec::new();
        for sp in points.iter().filter(|sp| sp.field_ext <= 2) {
            let emb = Embedding::new(sp.field(), &big)?;
            let pt: Vec<FqElem> = sp.point().iter().map(|x| emb.apply(x)).collect();
            if embedded.iter().any(|o| *o == pt || *o == frob(&pt)) {
                return Err(Error::usage(format!(
                    "branch data lists the point {} twice (up to conjugation)",
                    point_text(&pt)
                )));
            }
            embedded.push(pt);
        }
        for pt in variety.singular_points(2)? {
            if !embedded.iter().any(|o| *o == pt || *o == frob(&pt)) {
                return Err(Error::usage(format!(
                    "no branch data for the singular point {}",
                    point_text(&pt)
                )));
            }
        }
        Ok(SingularCurve { variety, points })
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn points(&self) -> &[SingularPointData] {
        &self.points
    }

    /// `sum (r_local - 1)` over all geometric singular points.
    pub fn c_d(&self) -> u64 {
        self.points
            .iter()
            .map(|sp| sp.orbit as u64 * (sp.r_local() as u64 - 1))
            .sum()
    }

    pub fn deltas(&self) -> Vec<u32> {
        self.points
            .iter()
            .flat_map(|sp| std::iter::repeat_n(sp.delta.delta, sp.orbit as usize))
            .collect()
    }

    /// `A_D(F_{q^n}) = #D(F_{q^n}) + sum (rational branches - 1)`.
    pub fn a_d_count(&self, n: u32) -> Result<AdCount> {
        let points = self.variety.count_points(n)?;
        let correction: i64 = self
            .points
            .iter()
            .filter(|sp| sp.is_rational_over(n))
            .map(|sp| sp.orbit as i64 * (sp.rational_branches(n) as i64 - 1))
            .sum();
        Ok(AdCount {
            n,
            points,
            correction,
            a_d: points as i64 + correction,
        })
    }
}

fn point_text(pt: &[FqElem]) -> String {
    let c: Vec<String> = if pt.iter().all(|x| x.as_prime_field().is_some()) {
        pt.iter().map(|x| x.as_prime_field().unwrap().to_string()).collect()
    } else {
        pt.iter().map(Ring::to_text).collect()
    };
    format!("({})", c.join(", "))
}

/// `(q + 1) r + 2 sqrt(q) sum g_j`.
pub fn weil_bound(genera: &[u32], q: u64) -> QuadSurd {
    let r = genera.len() as i64;
    let g: i64 = genera.iter().map(|&g| g as i64).sum();
    QuadSurd::new(
        BigRational::from_integer(BigInt::from((q as i64 + 1) * r)),
        BigRational::from_integer(BigInt::from(2 * g)),
        q,
    )
}

/// `A <= (q + 1) r + 2 sqrt(q) G`, decided by squaring.
pub fn weil_check(a: i64, genera: &[u32], q: u64) -> Check {
    let r = genera.len() as i64;
    let g: i64 = genera.iter().map(|&g| g as i64).sum();
    let lhs = BigInt::from(a) - BigInt::from((q as i64 + 1) * r);
    let ok = lhs <= BigInt::from(0) || &lhs * &lhs <= BigInt::from(4 * q as i64) * BigInt::from(g * g);
    Check::new(
        "weil_bound",
        ok,
        format!("A = {a} <= {} = (q + 1) r + 2 sqrt(q) G with q = {q}, r = {r}, G = {g}", weil_bound(genera, q)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch(k: &Arc<FiniteField>, coords: &[&str]) -> Vec<TruncSeries<FqElem>> {
        coords
            .iter()
            .map(|s| TruncSeries::parse_with(k, &["t"], 30, s).unwrap())
            .collect()
    }

    #[test]
    fn delta_of_monomial_curves() {
        let k = FiniteField::prime(7).unwrap();
        // (t^a, t^b) has (a - 1)(b - 1)/2 gaps
        for (a, b) in [(1, 2), (2, 3), (3, 4), (2, 5), (3, 5), (4, 5)] {
            let br = branch(&k, &[&format!("t^{a}"), &format!("t^{b}")]);
            let d = delta_invariant(&[br], 30).unwrap();
            assert_eq!(d.delta, (a - 1) * (b - 1) / 2, "({a}, {b})");
            assert!(d.checks.iter().all(Check::passed));
        }
    }

    #[test]
    fn delta_of_node_and_tacnode() {
        let k = FiniteField::prime(5).unwrap();
        let node = [branch(&k, &["t", "t"]), branch(&k, &["t", "-t"])];
        assert_eq!(delta_invariant(&node, 20).unwrap().delta, 1);
        let tac = [branch(&k, &["t", "t^2"]), branch(&k, &["t", "-t^2"])];
        let d = delta_invariant(&tac, 20).unwrap();
        assert_eq!((d.delta, d.r_local, d.mult), (2, 2, 2));
        let triple = [branch(&k, &["t", "0"]), branch(&k, &["0", "t"]), branch(&k, &["t", "t"])];
        assert_eq!(delta_invariant(&triple, 20).unwrap().delta, 3);
    }

    #[test]
    fn non_primitive_branch_is_inconclusive() {
        let k = FiniteField::prime(5).unwrap();
        let b = branch(&k, &["t^2", "t^4"]);
        assert!(matches!(delta_invariant(&[b], 20), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn weil_exact() {
        assert_eq!(weil_bound(&[0], 5).floor(), 6.into());
        assert!(weil_check(6, &[0], 5).passed());
        assert!(!weil_check(7, &[0], 5).passed());
        assert!(weil_check(10, &[1], 5).passed());
        assert!(!weil_check(11, &[1], 5).passed());
        assert_eq!(weil_bound(&[0, 0], 7).floor(), 16.into());
        assert!(weil_check(16, &[1], 9).passed());
        assert!(!weil_check(17, &[1], 9).passed());
    }

    #[test]
    fn genus_formula() {
        assert_eq!(genus_bookkeeping(&[0], &[1]), 1);
        assert_eq!(genus_bookkeeping(&[0, 0], &[1, 1, 2]), 3);
    }
}
