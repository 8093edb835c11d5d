//! Deterministic invariant suite backing the acceptance criteria.
//!
//! Every randomized section draws from a ChaCha stream seeded by the caller,
//! so a report is a pure function of `(tier, seed)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{dominance_failures, four_p_dominates, genus3_slack, hyp_i_threshold, sym2_genus3, sym2_invariants};
use crate::count::{delta_invariant, genus_bookkeeping, shipped_curves, weil_check, Ambient, SingularCurve, Variety};
use crate::error::{Error, Result};
use crate::fgroup::{disk_bound, ExpLog, FormalGroupLaw, Weierstrass};
use crate::jetint::{max_jet_order, overdetermined_bound, JetOrder, JetSearchConfig};
use crate::presets::{coordinate_jet_order, ProductElliptic, PRODUCT_EQ_INDEX, RMK_SHARP};
use crate::report::{all_pass, Check};
use crate::rings::arith::{rat, rat_int};
use crate::rings::{FiniteField, FqElem, LocalFieldParams, Padic, PadicNum};
use crate::series::{PolyOneForm, TruncSeries};
use crate::zeroest::{disk_formula, zero_bound_1var, TailGuard};

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub tier: Tier,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

struct Sizes {
    primes: &'static [u64],
    order: u32,
    conv_order: u32,
    polys: usize,
    form_pairs: usize,
    ext: u32,
    fields: &'static [u64],
    dominance_hi: u64,
}

impl Sizes {
    fn of(tier: Tier) -> Self {
        match tier {
            Tier::Quick => Sizes {
                primes: &[5, 7],
                order: 6,
                conv_order: 8,
                polys: 40,
                form_pairs: 10,
                ext: 1,
                fields: &[5],
                dominance_hi: 1000,
            },
            Tier::Full => Sizes {
                primes: &[5, 7, 11, 13],
                order: 10,
                conv_order: 12,
                polys: 200,
                form_pairs: 50,
                ext: 2,
                fields: &[5, 7],
                dominance_hi: 10_000,
            },
        }
    }
}

const CURVES: [[i64; 5]; 3] = [[0, 0, 1, 0, 0], [0, 0, 0, -1, 0], [0, 0, 1, -1, 0]];

fn criterion(id: u32, name: &'static str, body: impl FnOnce() -> Result<Vec<Check>>) -> Criterion {
    let checks = body().unwrap_or_else(|e| vec![Check::new("error", false, e.to_string())]);
    Criterion {
        id,
        name,
        passed: !checks.is_empty() && all_pass(&checks),
        checks,
    }
}

/// Collapses many checks of the same kind into one line naming the failures.
fn summarize(name: &str, results: Vec<(String, bool)>) -> Check {
    let total = results.len();
    let bad: Vec<String> = results.into_iter().filter(|(_, ok)| !ok).map(|(s, _)| s).collect();
    if bad.is_empty() {
        Check::new(name, true, format!("{total} cases"))
    } else {
        Check::new(name, false, format!("{} of {total} failed: {}", bad.len(), bad.join("; ")))
    }
}

fn laws(p: u64, prec: u32, order: u32) -> Result<Vec<(String, FormalGroupLaw<PadicNum>)>> {
    let k = Padic::new(p, prec)?;
    let mut out = vec![
        ("additive".to_string(), FormalGroupLaw::additive(&k, 1, order)?),
        ("multiplicative".to_string(), FormalGroupLaw::multiplicative(&k, order)),
    ];
    for a in CURVES {
        let w: Weierstrass = a.map(rat_int);
        out.push((format!("elliptic {a:?}"), FormalGroupLaw::elliptic(&k, &w, order, Some(p))?));
    }
    Ok(out)
}

fn formal_groups(s: &Sizes) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for &p in s.primes {
        for (name, g) in laws(p, 40, s.order)? {
            let el = ExpLog::new(&g)?;
            for c in g.axiom_checks()?.into_iter().chain(el.identity_checks(&g)?) {
                rows.push((format!("{name} p={p} {}: {}", c.name, c.detail), c.passed()));
            }
        }
    }
    Ok(vec![summarize("axioms_and_exp_log", rows)])
}

fn convergence(s: &Sizes) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for &p in s.primes {
        for (name, g) in laws(p, 40, s.conv_order)? {
            let el = ExpLog::new(&g)?;
            for c in el.convergence_checks(&g, p) {
                rows.push((format!("{name} p={p} {}: {}", c.name, c.detail), c.passed()));
            }
        }
    }
    Ok(vec![summarize("convergence_lemmas", rows)])
}

fn delta_vanishing(s: &Sizes) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    let top = s.order.min(10);
    for &p in s.primes {
        for (name, g) in laws(p, 40, s.order)? {
            let el = ExpLog::new(&g)?;
            for m in 1..=top as usize {
                let ok = el
                    .delta(m)
                    .iter()
                    .all(|d| d.min_degree().is_none_or(|deg| deg >= m as u32));
                rows.push((format!("{name} p={p} m={m}"), ok));
            }
        }
    }
    Ok(vec![summarize("delta_low_degree_vanishing", rows)])
}

/// `p`-adic valuation of a nonzero integer.
fn val(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.clone();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

fn eval_mod(f: &[BigInt], x: u64, p: &BigInt) -> BigInt {
    let x = BigInt::from(x);
    f.iter().rev().fold(BigInt::zero(), |acc, c| (acc * &x + c).mod_floor(p))
}

/// `f(a + b y)` as a polynomial in `y`.
fn shift(f: &[BigInt], a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); f.len()];
    // Horner in the polynomial ring: out = out * (a + b y) + c
    for c in f.iter().rev() {
        let mut next = vec![BigInt::zero(); f.len()];
        for (i, o) in out.iter().enumerate() {
            if o.is_zero() {
                continue;
            }
            next[i] += o * a;
            if i + 1 < f.len() {
                next[i + 1] += o * b;
            }
        }
        next[0] += c;
        out = next;
    }
    out
}

/// Multiplicity of `r` as a root of `f mod p`.
fn root_multiplicity(f: &[BigInt], r: u64, p: &BigInt) -> u32 {
    let mut g: Vec<BigInt> = f.iter().map(|c| c.mod_floor(p)).collect();
    let r = BigInt::from(r);
    let mut mult = 0;
    loop {
        while g.last().is_some_and(|c| c.is_zero()) {
            g.pop();
        }
        if g.is_empty() {
            return mult;
        }
        let value = g.iter().rev().fold(BigInt::zero(), |acc, c| (acc * &r + c).mod_floor(p));
        if !value.is_zero() {
            return mult;
        }
        // synthetic division by (y - r)
        let n = g.len();
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for i in (1..n).rev() {
            carry = (&g[i] + &carry * &r).mod_floor(p);
            q[i - 1] = carry.clone();
        }
        g = q;
        mult += 1;
    }
}

/// Distinct roots in `Z_p` of a nonzero integer polynomial, refining residue
/// classes by Hensel's lemma; a multiple residue root still unresolved after
/// `depth` refinements contributes its multiplicity.
fn hensel_roots(f: &[BigInt], p: u64, depth: u32) -> u32 {
    let pb = BigInt::from(p);
    let content = f.iter().filter(|c| !c.is_zero()).map(|c| val(c, &pb)).min().unwrap_or(0);
    let scale = pb.pow(content);
    let f: Vec<BigInt> = f.iter().map(|c| c / &scale).collect();
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let mut total = 0;
    for r in 0..p {
        if !eval_mod(&f, r, &pb).is_zero() {
            continue;
        }
        if !eval_mod(&df, r, &pb).is_zero() {
            total += 1;
        } else if depth == 0 {
            total += root_multiplicity(&f, r, &pb);
        } else {
            total += hensel_roots(&shift(&f, &BigInt::from(r), &pb), p, depth - 1);
        }
    }
    total
}

fn random_poly(rng: &mut ChaCha8Rng, p: u64) -> Vec<BigInt> {
    loop {
        let deg = rng.gen_range(1..=6usize);
        let f: Vec<BigInt> = (0..=deg)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    return BigInt::zero();
                }
                let c: i64 = rng.gen_range(-30..=30);
                BigInt::from(c) * BigInt::from(p).pow(rng.gen_range(0..=3))
            })
            .collect();
        if f.iter().any(|c| !c.is_zero()) {
            return f;
        }
    }
}

fn zero_oracle(s: &Sizes, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut with_roots = 0;
    for i in 0..s.polys {
        let p = [5u64, 7, 11][rng.gen_range(0..3)];
        let f = random_poly(&mut rng, p);
        let k = Padic::new(p, 60)?;
        let coeffs: Vec<PadicNum> = f.iter().map(|c| k.from_int(c)).collect();
        let h = TruncSeries::from_univariate(&k, 6, &coeffs);
        let nu = zero_bound_1var(&h, &rat_int(1), Some(&TailGuard::Polynomial))?.nu;
        // roots in pZ_p are the roots y of h(p y)
        let roots = hensel_roots(&shift(&f, &BigInt::zero(), &BigInt::from(p)), p, 12);
        let text: Vec<String> = f.iter().map(BigInt::to_string).collect();
        with_roots += usize::from(roots > 0);
        rows.push((format!("#{i} p={p} [{}]: roots {roots} > nu {nu}", text.join(", ")), roots <= nu));
    }
    Ok(vec![
        summarize("roots_in_pZp_at_most_nu", rows),
        Check::new("oracle_exercised", with_roots > 0, format!("{with_roots} polynomials have a root in pZ_p")),
    ])
}

fn disk_formula_checks() -> Result<Vec<Check>> {
    let lambda7 = LocalFieldParams::unramified(7)?.lambda();
    let (b3, f3) = disk_formula(3, &lambda7)?;
    let (b1, f1) = disk_formula(1, &lambda7)?;
    let mut rows = Vec::new();
    for p in [5u64, 7, 11, 13, 101] {
        let lambda = LocalFieldParams::unramified(p)?.lambda();
        let one = rat_int(1);
        for n in 1..=20u32 {
            let (b, fl) = disk_formula(n, &lambda)?;
            let alt = &one + rat_int(n as i64 - 1) / (&one - &lambda);
            rows.push((format!("p={p} N={n}"), b == alt && fl == alt.floor().to_integer()));
        }
    }
    Ok(vec![
        Check::new("p7_n3", b3 == rat(17, 5) && f3 == BigInt::from(3), format!("(3 - lambda)/(1 - lambda) = {b3}, floor {f3}")),
        Check::new("n1_is_one", b1 == rat_int(1) && f1 == BigInt::one(), format!("N = 1 gives {b1}")),
        summarize("two_forms_agree", rows),
    ])
}

fn rmk_sharp(s: &Sizes) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for &p in s.primes {
        let k = FiniteField::prime(p)?;
        let (w1, w2) = RMK_SHARP.forms(&k, 8)?;
        let r = max_jet_order(&w1, &w2, &RMK_SHARP.point(&k), &JetSearchConfig::new(6, s.ext))?;
        let bound = overdetermined_bound(&RMK_SHARP.branch_records(&k, 8)?)?;
        rows.push((format!("p={p}: m = {:?}, bound = {bound}", r.m), r.m == JetOrder::Exact(2) && bound == 2));
    }
    Ok(vec![summarize("jet_order_and_bound_are_two", rows)])
}

fn random_form(rng: &mut ChaCha8Rng, k: &std::sync::Arc<FiniteField>, p: u64, c: [i64; 2]) -> Result<PolyOneForm<FqElem>> {
    let mut f = [TruncSeries::zero(k, 2, 4), TruncSeries::zero(k, 2, 4)];
    for (i, fi) in f.iter_mut().enumerate() {
        fi.add_term(vec![0, 0], k.from_int(c[i]));
        for a in 0..=2u32 {
            for b in 0..=(2 - a) {
                if a + b > 0 {
                    fi.add_term(vec![a, b], k.from_int(rng.gen_range(0..p as i64)));
                }
            }
        }
    }
    let [f1, f2] = f;
    PolyOneForm::new(f1, f2)
}

fn off_divisor(s: &Sizes, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7f4a_7c15);
    let mut rows = Vec::new();
    for i in 0..s.form_pairs {
        let p = [5u64, 7, 11, 13][rng.gen_range(0..4)];
        let k = FiniteField::prime(p)?;
        let (a, b, c, d) = loop {
            let v: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..p as i64));
            if (v[0] * v[3] - v[1] * v[2]).rem_euclid(p as i64) != 0 {
                break (v[0], v[1], v[2], v[3]);
            }
        };
        let w1 = random_form(&mut rng, &k, p, [a, b])?;
        let w2 = random_form(&mut rng, &k, p, [c, d])?;
        let x = [k.from_int(0), k.from_int(0)];
        let r = max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(4, s.ext))?;
        rows.push((format!("#{i} p={p} ({}, {}): {:?}", w1.to_text(), w2.to_text(), r.m), r.m == JetOrder::Exact(0)));
    }
    Ok(vec![summarize("unit_wedge_gives_m_zero", rows)])
}

fn gaps(a: u32, b: u32) -> u32 {
    // elements of <a, b> below the conductor (a - 1)(b - 1), counted directly
    let limit = a * b;
    (0..limit)
        .filter(|&n| !(0..=n / a).any(|i| (n - i * a).is_multiple_of(b)))
        .count() as u32
}

fn weil_and_delta(s: &Sizes) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for &q in s.fields {
        for c in shipped_curves() {
            let v = Variety::parse(Ambient::Projective(2), q, &[c.poly])?;
            let sc = SingularCurve::new(v, &c.branches)?;
            let a = sc.a_d_count(1)?;
            let w = weil_check(a.a_d, &c.genera, q);
            rows.push((format!("{} over F_{q}: {}", c.name, w.detail), w.passed()));
            let ga = genus_bookkeeping(&c.genera, &sc.deltas());
            let plane = ((c.degree - 1) * (c.degree - 2) / 2) as i64;
            rows.push((format!("{} over F_{q}: arithmetic genus {ga} vs {plane}", c.name), ga == plane));
        }
    }
    let k = FiniteField::prime(7)?;
    let branch = |x: &str, y: &str| -> Result<Vec<TruncSeries<FqElem>>> {
        Ok(vec![
            TruncSeries::parse_with(&k, &["t"], 30, x)?,
            TruncSeries::parse_with(&k, &["t"], 30, y)?,
        ])
    };
    let mut deltas = Vec::new();
    for (x, y, a, b) in [("t^2", "t^3", 2, 3), ("t^3", "t^4", 3, 4), ("t", "t^2", 1, 2)] {
        let d = delta_invariant(&[branch(x, y)?], 30)?;
        let oracle = gaps(a, b);
        deltas.push((format!("({x}, {y}): delta {} vs gap count {oracle}", d.delta), d.delta == oracle));
    }
    let expected = [1, 3, 0];
    let oracle_ok = [(2, 3), (3, 4), (1, 2)].iter().zip(expected).all(|(&(a, b), e)| gaps(a, b) == e);
    Ok(vec![
        summarize("weil_and_genus", rows),
        summarize("delta_matches_gaps", deltas),
        Check::new("gap_oracle_values", oracle_ok, "gaps of <2,3>, <3,4>, <1,2> are 1, 3, 0"),
    ])
}

fn trial_division_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn constants(s: &Sizes) -> Result<Vec<Check>> {
    let t = hyp_i_threshold(&BigInt::from(6));
    let least = (t.floor().to_integer().to_string().parse::<u64>().unwrap_or(0) + 1..)
        .find(|&n| trial_division_prime(n))
        .unwrap();
    let inv = sym2_invariants(3)?;
    let table = [&inv.c1sq, &inv.theta_k, &inv.deg_hg, &inv.deg_h2x, &inv.deg_hkx].map(|x| x.to_string());
    let mut simp = Vec::new();
    for g in 2..=12u32 {
        let i = sym2_invariants(g)?;
        let expected = BigInt::from(8 * g as i64 - 10).pow(g);
        let ok = i.threshold == expected && i.checks.iter().any(|c| c.name == "threshold_simplification" && c.passed());
        simp.push((format!("g={g}"), ok));
    }
    let slack = genus3_slack(521) && sym2_genus3(521, &BigInt::from(0))?.checks.iter().all(Check::passed);
    let failures = dominance_failures(7, s.dominance_hi);
    // independent sweep with the trial-division primality test
    let sweep: Vec<(String, bool)> = (7..=s.dominance_hi)
        .filter(|&p| trial_division_prime(p))
        .map(|p| (format!("p={p}"), four_p_dominates(p)))
        .collect();
    Ok(vec![
        Check::new("hyp_i_threshold", t == rat_int(512), format!("(128/9) 6^2 = {t}")),
        Check::new("least_prime", least == 521, format!("least prime above 512 is {least}")),
        Check::new(
            "sym2_genus3_table",
            table == ["6", "6", "48", "24", "12"],
            format!("c1^2, theta.K, deg H^g, deg H^2 X, deg H.K = {}", table.join(", ")),
        ),
        summarize("threshold_simplification", simp),
        Check::new("below_7_1_p", slack, "6 (520/519)(521 + 4 sqrt(521) + 3) < 7.1 * 521"),
        Check::new(
            "four_p_dominance",
            failures.is_empty(),
            format!("primes 7..={} failing: {failures:?}", s.dominance_hi),
        ),
        summarize("four_p_dominance_sweep", sweep),
    ])
}

fn cross_module(s: &Sizes) -> Result<Vec<Check>> {
    let pe = ProductElliptic::new(s.order.min(6), 16)?;
    let params = LocalFieldParams::unramified(pe.p)?;
    let sub = pe.direction([1, 1, 1])?;
    let m = coordinate_jet_order(&sub, PRODUCT_EQ_INDEX)?;
    let r = disk_bound(&sub, &[PRODUCT_EQ_INDEX], &params, Some(m))?;
    let mut checks = vec![
        Check::new("unit_u3", r.n == 1 && m == 0, format!("N = {}, m = {m}", r.n)),
        Check::new("n_at_most_m_plus_one", r.n <= m + 1, format!("{} <= {}", r.n, m + 1)),
        Check::new("disk_bound_one", r.bound_floor == BigInt::one(), format!("bound {}", r.bound_real)),
    ];
    for u3 in [0, 7, 49] {
        let flat = pe.direction([1, 1, u3])?;
        let out = disk_bound(&flat, &[PRODUCT_EQ_INDEX], &params, None);
        checks.push(Check::new(
            format!("u3_{u3}_inconclusive"),
            matches!(out, Err(Error::Inconclusive(_))),
            match out {
                Err(e) => e.to_string(),
                Ok(r) => format!("unexpected bound with N = {}", r.n),
            },
        ));
    }
    Ok(checks)
}

fn determinism(s: &Sizes, seed: u64) -> Result<Vec<Check>> {
    let run = || -> Result<String> {
        let a = criterion(4, "zero_oracle", || zero_oracle(s, seed));
        let b = criterion(7, "off_divisor", || off_divisor(s, seed));
        serde_json::to_string(&[a, b]).map_err(|e| Error::Consistency(e.to_string()))
    };
    let (x, y) = (run()?, run()?);
    Ok(vec![Check::new(
        "randomized_sections_repeat",
        x == y,
        format!("{} bytes", x.len()),
    )])
}

pub fn run(tier: Tier, seed: u64) -> SelftestReport {
    let s = Sizes::of(tier);
    let criteria = vec![
        criterion(1, "formal_group_axioms_exp_log", || formal_groups(&s)),
        criterion(2, "convergence_lemmas", || convergence(&s)),
        criterion(3, "delta_vanishing", || delta_vanishing(&s)),
        criterion(4, "zero_estimate_oracle", || zero_oracle(&s, seed)),
        criterion(5, "disk_bound_formula", disk_formula_checks),
        criterion(6, "rmk_sharp", || rmk_sharp(&s)),
        criterion(7, "off_divisor_rigidity", || off_divisor(&s, seed)),
        criterion(8, "weil_and_delta", || weil_and_delta(&s)),
        criterion(9, "constants", || constants(&s)),
        criterion(10, "cross_module_link", || cross_module(&s)),
        criterion(11, "determinism", || determinism(&s, seed)),
    ];
    SelftestReport {
        tier,
        seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hensel_oracle_counts() {
        let f = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        // (x - 1)(x - 2)(x - 3) over Z_5
        assert_eq!(hensel_roots(&f(&[-6, 11, -6, 1]), 5, 12), 3);
        // x^2 - 2 has no root in Z_5, x^2 + 1 has two
        assert_eq!(hensel_roots(&f(&[-2, 0, 1]), 5, 12), 0);
        assert_eq!(hensel_roots(&f(&[1, 0, 1]), 5, 12), 2);
        // (x - 5)^2 = x^2 - 10 x + 25 has one root, x^2 - 25 two
        assert_eq!(hensel_roots(&f(&[25, -10, 1]), 5, 3), 2);
        assert_eq!(hensel_roots(&f(&[-25, 0, 1]), 5, 12), 2);
        assert_eq!(root_multiplicity(&f(&[0, 0, 1]), 0, &BigInt::from(5)), 2);
    }

    #[test]
    fn gap_counts() {
        assert_eq!(gaps(2, 3), 1);
        assert_eq!(gaps(3, 4), 3);
        assert_eq!(gaps(3, 5), 4);
        assert_eq!(gaps(1, 7), 0);
    }

    #[test]
    fn quick_suite_passes() {
        let r = run(Tier::Quick, DEFAULT_SEED);
        for c in &r.criteria {
            assert!(c.passed, "{c:?}");
        }
    }
}
