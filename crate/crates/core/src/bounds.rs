//! Closed-form bounds and hypothesis thresholds for points on surfaces in
//! abelian varieties, in exact rational and quadratic-surd arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{as_string, Check};
use crate::rings::arith::{factorial, is_prime, next_prime_above, pow_big, rat, rat_int};
use crate::rings::{LocalFieldParams, QuadSurd};

#[derive(Debug, Clone, Default)]
pub struct HDegrees {
    /// `deg(H^2 . X)`.
    pub h2x: Option<BigInt>,
    /// `deg(H . K_X)`.
    pub hkx: Option<BigInt>,
    /// `deg(H^n)`.
    pub hn: Option<BigInt>,
}

#[derive(Debug, Clone)]
pub struct SurfaceBoundInputs {
    pub params: LocalFieldParams,
    /// Dimension of the ambient abelian variety.
    pub n: Option<u32>,
    pub c1sq: BigInt,
    /// `#X'(k)`.
    pub nxk: BigInt,
    pub h: HDegrees,
}

impl SurfaceBoundInputs {
    pub fn new(params: LocalFieldParams, c1sq: impl Into<BigInt>, nxk: impl Into<BigInt>) -> Result<Self> {
        let c1sq = c1sq.into();
        if c1sq < BigInt::one() {
            return Err(Error::usage(format!("c1^2 = {c1sq} must be at least 1")));
        }
        let nxk = nxk.into();
        if nxk.is_negative() {
            return Err(Error::usage("#X'(k) must be nonnegative"));
        }
        Ok(SurfaceBoundInputs {
            params,
            n: None,
            c1sq,
            nxk,
            h: HDegrees::default(),
        })
    }

    pub fn with_h_degrees(mut self, n: u32, h2x: BigInt, hkx: BigInt, hn: BigInt) -> Result<Self> {
        for (name, v) in [("degH2X", &h2x), ("degHn", &hn)] {
            if !v.is_positive() {
                return Err(Error::usage(format!("{name} must be positive")));
            }
        }
        if n == 0 {
            return Err(Error::usage("n must be positive"));
        }
        self.n = Some(n);
        self.h = HDegrees {
            h2x: Some(h2x),
            hkx: Some(hkx),
            hn: Some(hn),
        };
        Ok(self)
    }
}

/// `(128/9) c1^2`.
pub fn hyp_i_threshold(c1sq: &BigInt) -> BigRational {
    rat(128, 9) * BigRational::from_integer(c1sq * c1sq)
}

/// `n! (3 a + b)^n / (n^n c)`.
pub fn degree_threshold(n: u32, h2x: &BigInt, hkx: &BigInt, hn: &BigInt) -> BigRational {
    let base = BigInt::from(3) * h2x + hkx;
    let num = factorial(n as u64) * base.pow(n);
    let den = BigInt::from(n).pow(n) * hn;
    BigRational::new(num, den)
}

/// `max{3 c1^2 + 2, n! (3 a + b)^n / (n^n c)}`.
pub fn hyp_ii_threshold(inputs: &SurfaceBoundInputs) -> Result<BigRational> {
    let missing: Vec<&str> = [
        ("n", inputs.n.is_none()),
        ("degH2X", inputs.h.h2x.is_none()),
        ("degHKX", inputs.h.hkx.is_none()),
        ("degHn", inputs.h.hn.is_none()),
    ]
    .iter()
    .filter(|(_, m)| *m)
    .map(|(n, _)| *n)
    .collect();
    if !missing.is_empty() {
        return Err(Error::usage(format!("hypothesis (ii) needs {}", missing.join(", "))));
    }
    let t = degree_threshold(
        inputs.n.unwrap(),
        inputs.h.h2x.as_ref().unwrap(),
        inputs.h.hkx.as_ref().unwrap(),
        inputs.h.hn.as_ref().unwrap(),
    );
    let linear = BigRational::from_integer(BigInt::from(3) * &inputs.c1sq + 2);
    Ok(if t > linear { t } else { linear })
}

#[derive(Debug, Clone, Serialize)]
pub struct Guards {
    pub ramification: bool,
    pub hyp_i: bool,
    #[serde(serialize_with = "as_string")]
    pub hyp_i_threshold: BigRational,
    pub hyp_ii: Option<bool>,
    #[serde(serialize_with = "opt_string")]
    pub hyp_ii_threshold: Option<BigRational>,
    pub checks: Vec<Check>,
}

fn opt_string<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

impl Guards {
    /// The ramification condition together with (i) or (ii).
    pub fn met(&self) -> bool {
        self.ramification && (self.hyp_i || self.hyp_ii == Some(true))
    }
}

/// Hypothesis (ii) is evaluated when any of its inputs is present.
pub fn guards(inputs: &SurfaceBoundInputs) -> Result<Guards> {
    let k = &inputs.params;
    let p = rat_int(k.p);
    let ramification = k.ramification_guard();
    let t1 = hyp_i_threshold(&inputs.c1sq);
    let hyp_i = p > t1;
    let any_ii = inputs.n.is_some() || inputs.h.h2x.is_some() || inputs.h.hkx.is_some() || inputs.h.hn.is_some();
    let t2 = if any_ii { Some(hyp_ii_threshold(inputs)?) } else { None };
    let hyp_ii = t2.as_ref().map(|t| p > *t);
    let mut checks = vec![
        Check::new(
            "ramification",
            ramification,
            format!("p = {} > max(e + 1, exp(e / exp(1))) with e = {}", k.p, k.e),
        ),
        Check::new("hyp_i", hyp_i, format!("p = {} > (128/9) c1^2 ^2 = {t1}", k.p)),
    ];
    checks.push(match (&t2, hyp_ii) {
        (Some(t), Some(ok)) => Check::new("hyp_ii", ok, format!("p = {} > {t}", k.p)),
        _ => Check::skipped("hyp_ii", "n and H-degrees not supplied"),
    });
    Ok(Guards {
        ramification,
        hyp_i,
        hyp_i_threshold: t1,
        hyp_ii,
        hyp_ii_threshold: t2,
        checks,
    })
}

/// `sqrt(p^f)` as a surd in `sqrt(p)`.
pub fn sqrt_q(p: u64, f: u32) -> QuadSurd {
    let half = pow_big(p, f / 2);
    if f.is_multiple_of(2) {
        QuadSurd::rational(BigRational::from_integer(half), p)
    } else {
        QuadSurd::new(BigRational::zero(), BigRational::from_integer(half), p)
    }
}

fn surd_int(n: impl Into<BigInt>, p: u64) -> QuadSurd {
    QuadSurd::rational(BigRational::from_integer(n.into()), p)
}

/// `q + 4 sqrt(q) + 3`.
fn rh_factor(p: u64, f: u32) -> QuadSurd {
    surd_int(pow_big(p, f) + 3, p) + sqrt_q(p, f).scale(&rat_int(4))
}

#[derive(Debug, Clone, Serialize)]
pub struct MainBound {
    #[serde(serialize_with = "as_string")]
    pub bound_real: QuadSurd,
    pub bound_approx: f64,
    /// Largest integer not exceeding the bound (the bound is on a cardinality).
    #[serde(serialize_with = "as_string")]
    pub bound_int: BigInt,
    /// `#X'(k) + 4 p c1^2`.
    #[serde(serialize_with = "as_string")]
    pub simplified: BigInt,
    pub hypotheses_met: bool,
    pub guards: Guards,
    pub checks: Vec<Check>,
}

/// `#X'(k) + (1 - e/(p-1))^{-1} (q + 4 sqrt(q) + 3) c1^2`.
pub fn main_bound(inputs: &SurfaceBoundInputs, formula_only: bool) -> Result<MainBound> {
    let k = &inputs.params;
    let g = guards(inputs)?;
    if !formula_only && !g.met() {
        let failed: Vec<&str> = g
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.as_str())
            .collect();
        return Err(Error::hypothesis(
            "main_bound",
            format!("hypotheses not met ({}); pass formula-only to evaluate anyway", failed.join(", ")),
        ));
    }
    let one_minus = k.one_minus_lambda();
    if !one_minus.is_positive() {
        return Err(Error::usage(format!(
            "lambda = e/(p-1) = {} >= 1: the bound is undefined",
            k.lambda()
        )));
    }
    let p = k.p;
    let c1sq = BigRational::from_integer(inputs.c1sq.clone());
    let bound = surd_int(inputs.nxk.clone(), p) + rh_factor(p, k.f).scale(&(c1sq / one_minus));
    let simplified = &inputs.nxk + BigInt::from(4 * p) * &inputs.c1sq;
    let mut checks = Vec::new();
    if k.e == 1 && k.f == 1 && p >= 7 {
        checks.push(Check::new(
            "four_p_dominance",
            bound < surd_int(simplified.clone(), p),
            format!("bound < #X'(k) + 4 p c1^2 = {simplified}"),
        ));
    }
    Ok(MainBound {
        bound_approx: bound.to_f64(),
        bound_int: bound.floor(),
        bound_real: bound,
        simplified,
        hypotheses_met: g.met(),
        guards: g,
        checks,
    })
}

/// `q^2 + b3 q^{3/2} + b2 q + b1 q^{1/2} + 1`, rounded up.
pub fn rh_point_upper(p: u64, f: u32, b1: u64, b2: u64, b3: u64) -> (QuadSurd, BigInt) {
    let q = pow_big(p, f);
    let s = sqrt_q(p, f);
    let v = surd_int(&q * &q + &q * b2 + 1, p)
        + s.scale(&BigRational::from_integer(&q * b3 + b1));
    let c = v.ceil();
    (v, c)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveBound {
    pub formula: &'static str,
    #[serde(serialize_with = "as_string")]
    pub bound_real: QuadSurd,
    #[serde(serialize_with = "as_string")]
    pub bound_int: BigInt,
    pub hypotheses_met: bool,
    pub checks: Vec<Check>,
}

/// `#C'(F_p) + 2g - 2`.
pub fn coleman(g: u32, p: u64, count: &BigInt) -> Result<CurveBound> {
    if g < 2 {
        return Err(Error::usage("the Coleman bound needs genus at least 2"));
    }
    if !is_prime(p) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    let b = count + BigInt::from(2 * g - 2);
    let ok = p > 2 * g as u64;
    Ok(CurveBound {
        formula: "count + 2g - 2",
        bound_real: surd_int(b.clone(), p),
        bound_int: b,
        hypotheses_met: ok,
        checks: vec![Check::new("p_gt_2g", ok, format!("p = {p} > 2g = {}", 2 * g))],
    })
}

/// `((p - 1)/(p - 2)) (p + 4 sqrt(p) + 3)`.
fn sym2_factor(p: u64) -> QuadSurd {
    rh_factor(p, 1).scale(&rat(p as i64 - 1, p as i64 - 2))
}

/// Bound for the symmetric square of a genus `g >= 3` curve.
pub fn sym2_bound(g: u32, p: u64, count: &BigInt) -> Result<CurveBound> {
    if g < 3 {
        return Err(Error::usage("the symmetric-square bound needs genus at least 3"));
    }
    if !is_prime(p) || p < 3 {
        return Err(Error::usage(format!("{p} is not an odd prime")));
    }
    let inv = sym2_invariants(g)?;
    let b = surd_int(count.clone(), p) + sym2_factor(p).scale(&BigRational::from_integer(inv.c1sq.clone()));
    let ok = BigInt::from(p) > inv.threshold;
    let mut checks = vec![Check::new(
        "threshold",
        ok,
        format!("p = {p} > (8g - 10)^g = {}", inv.threshold),
    )];
    checks.extend(inv.checks);
    Ok(CurveBound {
        formula: "count + ((p-1)/(p-2)) (p + 4 sqrt(p) + 3) (4g-9)(g-1)",
        bound_int: b.floor(),
        bound_real: b,
        hypotheses_met: ok,
        checks,
    })
}

/// `6 (p-1)/(p-2) (p + 4 sqrt(p) + 3) < 7.1 p`.
pub fn genus3_slack(p: u64) -> bool {
    sym2_factor(p).scale(&rat_int(6)) < surd_int(0, p) + QuadSurd::rational(rat(71 * p as i64, 10), p)
}

/// The genus-3 strengthening: coefficient 6 and `p > (128/9) 6^2 = 512`.
pub fn sym2_genus3(p: u64, count: &BigInt) -> Result<CurveBound> {
    if !is_prime(p) || p < 3 {
        return Err(Error::usage(format!("{p} is not an odd prime")));
    }
    let t = hyp_i_threshold(&BigInt::from(6));
    let least = next_prime_above(&t.to_integer());
    let ok = rat_int(p) > t;
    let b = surd_int(count.clone(), p) + sym2_factor(p).scale(&rat_int(6));
    let slack = genus3_slack(p);
    Ok(CurveBound {
        formula: "count + 6 ((p-1)/(p-2)) (p + 4 sqrt(p) + 3)",
        bound_int: b.floor(),
        bound_real: b,
        hypotheses_met: ok,
        checks: vec![
            Check::new("threshold", ok, format!("p = {p} > (128/9) 6^2 = {t}; least such prime {least}")),
            Check::new("below_7_1_p", slack, format!("6 (p-1)/(p-2) (p + 4 sqrt(p) + 3) < 7.1 p = {}", rat(71 * p as i64, 10))),
        ],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Sym2Invariants {
    pub g: u32,
    #[serde(serialize_with = "as_string")]
    pub c1sq: BigInt,
    #[serde(serialize_with = "as_string")]
    pub theta_k: BigInt,
    #[serde(serialize_with = "as_string")]
    pub deg_hg: BigInt,
    #[serde(serialize_with = "as_string")]
    pub deg_h2x: BigInt,
    #[serde(serialize_with = "as_string")]
    pub deg_hkx: BigInt,
    #[serde(serialize_with = "as_string")]
    pub threshold: BigInt,
    pub v2: i64,
    pub dv: i64,
    pub d2: i64,
    pub checks: Vec<Check>,
}

pub fn sym2_invariants(g: u32) -> Result<Sym2Invariants> {
    if g < 2 {
        return Err(Error::usage("symmetric squares need genus at least 2"));
    }
    let gi = g as i64;
    let c1sq = BigInt::from((4 * gi - 9) * (gi - 1));
    let theta_k = BigInt::from(2 * gi * (gi - 2));
    let deg_hg = BigInt::from(2).pow(g) * factorial(g as u64);
    let deg_h2x = BigInt::from(4 * gi * (gi - 1));
    let deg_hkx = BigInt::from(4 * gi * (gi - 2));
    let threshold = BigInt::from(8 * gi - 10).pow(g);
    let (v2, dv, d2) = (1i64, 2i64, 4 - 4 * g as i64);
    // K = (2g - 2) V - D/2 and theta = (g + 1) V - D/2
    let k_v = rat_int(2 * g as i64 - 2);
    let half = rat(-1, 2);
    let dot = |a1: &BigRational, b1: &BigRational, a2: &BigRational, b2: &BigRational| {
        a1 * a2 * rat_int(v2) + (a1 * b2 + b1 * a2) * rat_int(dv) + b1 * b2 * rat_int(d2)
    };
    let k_sq = dot(&k_v, &half, &k_v, &half);
    let th_k = dot(&rat_int(g as i64 + 1), &half, &k_v, &half);
    let simplification = degree_threshold(g, &deg_h2x, &deg_hkx, &deg_hg) == BigRational::from_integer(threshold.clone());
    let checks = vec![
        Check::new("c1sq_positive", c1sq >= BigInt::one(), format!("c1^2 = {c1sq}")),
        Check::new(
            "c1sq_from_intersections",
            k_sq == BigRational::from_integer(c1sq.clone()),
            format!("K^2 = {k_sq}"),
        ),
        Check::new(
            "theta_k_from_intersections",
            th_k == BigRational::from_integer(theta_k.clone()),
            format!("theta.K = {th_k}"),
        ),
        Check::new(
            "threshold_simplification",
            simplification,
            "g! (3 deg(H^2 X) + deg(H K))^g / (g^g deg(H^g)) = (8g - 10)^g",
        ),
    ];
    Ok(Sym2Invariants {
        g,
        c1sq,
        theta_k,
        deg_hg,
        deg_h2x,
        deg_hkx,
        threshold,
        v2,
        dv,
        d2,
        checks,
    })
}

/// `((p - 1)/(p - 2)) (p + 4 sqrt(p) + 3) < 4 p`.
pub fn four_p_dominates(p: u64) -> bool {
    sym2_factor(p) < surd_int(4 * p, p)
}

/// Primes in `[lo, hi]` where the `4p` simplification fails.
pub fn dominance_failures(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_prime(p) && !four_p_dominates(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(p: u64, e: u32, f: u32, c1sq: i64, nxk: i64) -> SurfaceBoundInputs {
        SurfaceBoundInputs::new(LocalFieldParams::new(p, e, f).unwrap(), c1sq, nxk).unwrap()
    }

    #[test]
    fn main_bound_example() {
        let b = main_bound(&inputs(7, 1, 1, 1, 50), true).unwrap();
        assert_eq!(b.bound_int, 74.into());
        assert_eq!(b.bound_real.to_string(), "62+24/5*sqrt(7)");
        assert_eq!(b.simplified, 78.into());
        assert!(b.checks.iter().all(Check::passed));
        assert!(!b.hypotheses_met);
        assert!(matches!(main_bound(&inputs(7, 1, 1, 1, 50), false), Err(Error::Hypothesis { .. })));
        let exact = main_bound(&inputs(3, 1, 2, 1, 0), true).unwrap();
        // (1/2)^{-1} (9 + 12 + 3)
        assert_eq!(exact.bound_real, surd_int(48, 3));
        assert!(SurfaceBoundInputs::new(LocalFieldParams::unramified(7).unwrap(), 0, 1).is_err());
        assert!(matches!(main_bound(&inputs(3, 2, 1, 1, 0), true), Err(Error::Usage(_))));
    }

    #[test]
    fn guard_examples() {
        let g = guards(&inputs(521, 1, 1, 6, 0)).unwrap();
        assert!(g.hyp_i && g.ramification);
        assert_eq!(g.hyp_i_threshold, rat_int(512));
        assert!(!guards(&inputs(509, 1, 1, 6, 0)).unwrap().hyp_i);
        assert!(LocalFieldParams::new(3, 1, 1).unwrap().ramification_guard());
        assert!(!LocalFieldParams::new(2, 1, 1).unwrap().ramification_guard());
        let inv = sym2_invariants(3).unwrap();
        let with_h = inputs(2753, 1, 1, 6, 0)
            .with_h_degrees(3, inv.deg_h2x.clone(), inv.deg_hkx.clone(), inv.deg_hg.clone())
            .unwrap();
        let g = guards(&with_h).unwrap();
        assert_eq!(g.hyp_ii_threshold, Some(rat_int(2744)));
        assert_eq!(g.hyp_ii, Some(true));
        let mut partial = inputs(7, 1, 1, 1, 0);
        partial.n = Some(3);
        let err = guards(&partial).unwrap_err();
        assert!(err.to_string().contains("degH2X"));
    }

    #[test]
    fn rh_upper() {
        assert_eq!(rh_point_upper(7, 1, 0, 0, 0).1, 50.into());
        assert_eq!(rh_point_upper(7, 1, 4, 6, 4).1, 177.into());
        assert_eq!(rh_point_upper(5, 2, 0, 0, 1).1, BigInt::from(625 + 125 + 1));
    }

    #[test]
    fn curve_bounds() {
        let c = coleman(2, 7, &8.into()).unwrap();
        assert_eq!(c.bound_int, 10.into());
        assert!(c.hypotheses_met);
        let s = sym2_genus3(521, &1000.into()).unwrap();
        assert!(s.checks.iter().all(Check::passed));
        assert!(s.checks[0].detail.contains("521"));
        assert!(genus3_slack(521));
        let low = sym2_genus3(509, &0.into()).unwrap();
        assert!(!low.hypotheses_met);
        let general = sym2_bound(3, 521, &0.into()).unwrap();
        assert!(!general.hypotheses_met);
        assert!(sym2_bound(3, 2753, &0.into()).unwrap().hypotheses_met);
    }

    #[test]
    fn sym2_table() {
        let i = sym2_invariants(3).unwrap();
        let v: Vec<i64> = [&i.c1sq, &i.theta_k, &i.deg_hg, &i.deg_h2x, &i.deg_hkx, &i.threshold]
            .iter()
            .map(|x: &&BigInt| i64::try_from(*x).unwrap())
            .collect();
        assert_eq!(v, vec![6, 6, 48, 24, 12, 2744]);
        assert_eq!(i.d2, -8);
        assert!(i.checks.iter().all(Check::passed));
        let g4 = sym2_invariants(4).unwrap();
        assert_eq!((g4.c1sq.clone(), g4.threshold.clone()), (21.into(), 234256.into()));
        let g2 = sym2_invariants(2).unwrap();
        assert_eq!(g2.c1sq, BigInt::from(-1));
        assert!(!g2.checks[0].passed());
        for g in 2..=12 {
            assert!(sym2_invariants(g).unwrap().checks[1..].iter().all(Check::passed), "g = {g}");
        }
    }

    #[test]
    fn dominance_small_primes() {
        assert!(dominance_failures(7, 2000).is_empty());
        assert!(!four_p_dominates(5));
    }
}
