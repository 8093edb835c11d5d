use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fgroup::law::FormalGroupLaw;
use crate::report::Check;
use crate::rings::arith::{binomial, factorial, factorial_valuation, pow_big};
use crate::scalar::{Field, PValued, Ring};
use crate::series::TruncSeries;

type Tuple<S> = Vec<TruncSeries<S>>;

/// Multiplication-by-`m` series, iterated differences, exponential and
/// logarithm of a formal group law, all computed once to the law's order.
#[derive(Debug, Clone)]
pub struct ExpLog<S: Ring> {
    n: usize,
    order: u32,
    psi: Vec<Tuple<S>>,
    delta: Vec<Tuple<S>>,
    exp: Tuple<S>,
    log: Tuple<S>,
}

fn identity<S: Ring>(ctx: &S::Ctx, n: usize, order: u32) -> Tuple<S> {
    (0..n).map(|i| TruncSeries::var(ctx, n, order, i)).collect()
}

fn compose_all<S: Ring>(outer: &[TruncSeries<S>], inner: &[TruncSeries<S>]) -> Result<Tuple<S>> {
    outer.iter().map(|f| f.compose(inner)).collect()
}

/// `Psi^[m] = F(Psi^[m-1], t)` with `Psi^[0] = 0`, for any `m`.
pub fn mult_by_m<S: Field>(g: &FormalGroupLaw<S>, m: u64) -> Result<Tuple<S>> {
    let (n, t) = (g.dim(), g.order());
    let ctx = g.ctx();
    let id = identity::<S>(ctx, n, t);
    let mut cur = vec![TruncSeries::zero(ctx, n, t); n];
    for _ in 0..m {
        cur = g.apply(&cur, &id)?;
    }
    Ok(cur)
}

impl<S: Field> ExpLog<S> {
    /// Fails with a consistency error when some `Delta^[m]` has a term of
    /// degree below `m`.
    pub fn new(g: &FormalGroupLaw<S>) -> Result<Self> {
        let (n, t) = (g.dim(), g.order());
        if t == 0 {
            return Err(Error::usage("truncation order must be at least 1"));
        }
        let ctx = g.ctx();
        let id = identity::<S>(ctx, n, t);
        let mut psi = vec![vec![TruncSeries::zero(ctx, n, t); n]];
        for m in 1..=t as usize {
            let next = g.apply(&psi[m - 1], &id)?;
            psi.push(next);
        }

        let mut delta = vec![psi[0].clone()];
        for m in 1..=t as u64 {
            let mut d = vec![TruncSeries::zero(ctx, n, t); n];
            for i in 0..=m {
                let mut c = binomial(m, i);
                if (m - i) % 2 == 1 {
                    c = -c;
                }
                let c = S::from_integer(ctx, &c);
                for (dj, pj) in d.iter_mut().zip(&psi[i as usize]) {
                    *dj = dj.add(&pj.scale(&c));
                }
            }
            for (j, dj) in d.iter().enumerate() {
                if let Some(low) = dj.min_degree() {
                    if low < m as u32 {
                        return Err(Error::Consistency(format!(
                            "Delta^[{m}]_{} has a term of degree {low} < {m}",
                            j + 1
                        )));
                    }
                }
            }
            delta.push(d);
        }

        let mut exp = vec![TruncSeries::zero(ctx, n, t); n];
        let mut log = vec![TruncSeries::zero(ctx, n, t); n];
        for m in 1..=t as usize {
            let fact = S::from_integer(ctx, &factorial(m as u64));
            for j in 0..n {
                let hom = delta[m][j].homogeneous_part(m as u32);
                exp[j] = exp[j].add(&hom.scale(&fact.inv()?));
                let sign = if m % 2 == 1 { 1 } else { -1 };
                let c = S::from_i64(ctx, sign).div_int(m as i64)?;
                log[j] = log[j].add(&delta[m][j].scale(&c));
            }
        }
        Ok(ExpLog {
            n,
            order: t,
            psi,
            delta,
            exp,
            log,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `Psi^[m]` for `m <= order`.
    pub fn psi(&self, m: usize) -> &[TruncSeries<S>] {
        &self.psi[m]
    }

    /// `Delta^[m]` for `1 <= m <= order`.
    pub fn delta(&self, m: usize) -> &[TruncSeries<S>] {
        &self.delta[m]
    }

    pub fn exp(&self) -> &[TruncSeries<S>] {
        &self.exp
    }

    pub fn log(&self) -> &[TruncSeries<S>] {
        &self.log
    }

    fn ctx(&self) -> &S::Ctx {
        self.exp[0].ctx()
    }

    /// Round trips, the homomorphism property of `Log` and the linear part
    /// of `Exp`.
    pub fn identity_checks(&self, g: &FormalGroupLaw<S>) -> Result<Vec<Check>> {
        let (n, t) = (self.n, self.order);
        let id = identity::<S>(self.ctx(), n, t);
        let exp_log = compose_all(&self.exp, &self.log)? == id;
        let log_exp = compose_all(&self.log, &self.exp)? == id;

        let lhs = compose_all(&self.log, g.series())?;
        let x: Vec<usize> = (0..n).collect();
        let y: Vec<usize> = (n..2 * n).collect();
        let hom = lhs
            .iter()
            .zip(&self.log)
            .all(|(l, lj)| *l == lj.embed(2 * n, &x).add(&lj.embed(2 * n, &y)));

        let linear = self.exp.iter().zip(&id).all(|(e, x)| e.truncate(1) == x.truncate(1));
        Ok(vec![
            Check::new("exp_log_identity", exp_log, format!("Exp(Log(x)) = x to order {t}")),
            Check::new("log_exp_identity", log_exp, format!("Log(Exp(x)) = x to order {t}")),
            Check::new("log_homomorphism", hom, format!("Log(F(x,y)) = Log(x) + Log(y) to order {t}")),
            Check::new("exp_linear_part", linear, "Exp(x) = x + O(deg 2)"),
        ])
    }

    /// Like [`ExpLog::identity_checks`] but turns any failure into an error.
    pub fn verify(&self, g: &FormalGroupLaw<S>) -> Result<Vec<Check>> {
        let checks = self.identity_checks(g)?;
        if let Some(bad) = checks.iter().find(|c| !c.passed()) {
            return Err(Error::Consistency(format!("{}: {}", bad.name, bad.detail)));
        }
        Ok(checks)
    }

    /// Independent computations of `Log`: the compositional inverse of
    /// `Exp` by fixed-point iteration, and in dimension one the integral of
    /// the invariant differential `dt / F_x(0, t)`.
    pub fn oracle_checks(&self, g: &FormalGroupLaw<S>) -> Result<Vec<Check>> {
        let (n, t) = (self.n, self.order);
        let ctx = self.ctx().clone();
        let id = identity::<S>(&ctx, n, t);
        let mut inv = id.clone();
        for _ in 0..t {
            let e = compose_all(&self.exp, &inv)?;
            inv = inv
                .iter()
                .zip(e.iter().zip(&id))
                .map(|(gi, (ei, xi))| gi.sub(&ei.sub(xi)))
                .collect();
        }
        let mut out = vec![Check::new(
            "log_is_inverse_of_exp",
            inv == self.log,
            format!("fixed-point inverse of Exp agrees with Log to order {t}"),
        )];
        if n == 1 {
            let fx = g.series()[0].derivative(0);
            let z = TruncSeries::zero(&ctx, 1, t);
            let v = TruncSeries::var(&ctx, 1, t, 0);
            let omega = fx.compose(&[z, v])?.inverse()?;
            let integral = omega.integrate(0)?.truncate(t);
            out.push(Check::new(
                "log_is_invariant_integral",
                integral == self.log[0],
                format!("integral of dt/F_x(0,t) agrees with Log to order {t}"),
            ));
        } else {
            out.push(Check::skipped("log_is_invariant_integral", "dimension above one"));
        }
        Ok(out)
    }
}

impl<S: PValued> ExpLog<S> {
    /// Integrality of the law and of `Psi^[m]`, `m! * c` integral for every
    /// degree-`m` coefficient `c` of `Exp`, and `|b| <= m` for every degree-`m`
    /// coefficient `b` of `Log` (unramified degree one).
    pub fn convergence_checks(&self, g: &FormalGroupLaw<S>, p: u64) -> Vec<Check> {
        let integral = |s: &TruncSeries<S>| s.terms().all(|(_, c)| c.p_valuation(p).is_none_or(|v| v >= 0));
        let law_ok = g.series().iter().all(integral);
        let psi_ok = self.psi.iter().flatten().all(integral);

        let mut exp_count = 0usize;
        let mut exp_bad = Vec::new();
        for (j, e) in self.exp.iter().enumerate() {
            for (a, c) in e.terms() {
                let m: u32 = a.iter().sum();
                exp_count += 1;
                if let Some(v) = c.p_valuation(p) {
                    if v + factorial_valuation(m as u64, p) < 0 {
                        exp_bad.push(format!("Exp_{} {a:?}", j + 1));
                    }
                }
            }
        }

        let mut log_count = 0usize;
        let mut log_bad = Vec::new();
        for (j, l) in self.log.iter().enumerate() {
            for (a, b) in l.terms() {
                let m: u32 = a.iter().sum();
                log_count += 1;
                if let Some(v) = b.p_valuation(p) {
                    if v < 0 && pow_big(p, (-v) as u32) > BigInt::from(m) {
                        log_bad.push(format!("Log_{} {a:?}", j + 1));
                    }
                }
            }
        }

        let t = self.order;
        vec![
            Check::new("law_integral", law_ok, "every coefficient of F has norm at most 1"),
            Check::new("psi_integral", psi_ok, format!("Psi^[m] integral for m <= {t}")),
            Check::new(
                "exp_factorial_integrality",
                exp_bad.is_empty(),
                if exp_bad.is_empty() {
                    format!("m! * c integral for all {exp_count} Exp coefficients")
                } else {
                    format!("fails at {}", exp_bad.join(", "))
                },
            ),
            Check::new(
                "log_growth",
                log_bad.is_empty(),
                if log_bad.is_empty() {
                    format!("|b| <= m for all {log_count} Log coefficients")
                } else {
                    format!("fails at {}", log_bad.join(", "))
                },
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::arith::{rat, rat_int};
    use crate::rings::{Padic, PadicNum};
    use num_rational::BigRational;

    type Q = TruncSeries<BigRational>;

    #[test]
    fn multiplicative_closed_forms() {
        let g = FormalGroupLaw::<BigRational>::multiplicative(&(), 8);
        let el = ExpLog::new(&g).unwrap();
        assert_eq!(el.psi(3)[0].to_text(), "3*x1 + 3*x1^2 + x1^3");
        for m in 1..=8u32 {
            assert_eq!(el.delta(m as usize)[0], Q::var(&(), 1, 8, 0).pow(m));
            let sign = if m % 2 == 1 { 1 } else { -1 };
            assert_eq!(el.log()[0].coeff(&[m]), rat(sign, m as i64));
            assert_eq!(el.exp()[0].coeff(&[m]), BigRational::new(1.into(), factorial(m as u64)));
        }
    }

    #[test]
    fn additive_is_trivial() {
        let g = FormalGroupLaw::<BigRational>::additive(&(), 2, 6).unwrap();
        let el = ExpLog::new(&g).unwrap();
        assert_eq!(el.psi(4)[1].to_text(), "4*x2");
        assert!(el.delta(2)[0].is_zero());
        assert_eq!(el.exp()[0].to_text(), "x1");
        assert_eq!(el.log()[1].to_text(), "x2");
    }

    #[test]
    fn elliptic_identities_and_oracles() {
        let a = [0, 0, 1, 0, 0].map(rat_int);
        let g = FormalGroupLaw::<BigRational>::elliptic(&(), &a, 9, None).unwrap();
        let el = ExpLog::new(&g).unwrap();
        for c in el.identity_checks(&g).unwrap().into_iter().chain(el.oracle_checks(&g).unwrap()) {
            assert!(c.passed(), "{c:?}");
        }
        assert_eq!(mult_by_m(&g, 4).unwrap(), el.psi(4).to_vec());
    }

    #[test]
    fn padic_matches_rational() {
        let a = [1, -1, 0, 1, 0].map(rat_int);
        let k = Padic::new(7, 14).unwrap();
        let gq = FormalGroupLaw::<BigRational>::elliptic(&(), &a, 10, Some(7)).unwrap();
        let gp = FormalGroupLaw::<PadicNum>::elliptic(&k, &a, 10, Some(7)).unwrap();
        let eq = ExpLog::new(&gq).unwrap();
        let ep = ExpLog::new(&gp).unwrap();
        let mapped = eq.log()[0].map_ring(&k, |c| k.from_rational(c));
        assert_eq!(mapped, ep.log()[0]);
        for c in ep.convergence_checks(&gp, 7) {
            assert!(c.passed(), "{c:?}");
        }
        for c in eq.convergence_checks(&gq, 7) {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn log_growth_failure_is_reported() {
        // x + y + xy/5 is not integral at 5 and its Log has b_2 = -1/10
        let x = Q::var(&(), 2, 4, 0);
        let y = Q::var(&(), 2, 4, 1);
        let f = x.add(&y).add(&x.mul(&y).scale(&rat(1, 5)));
        let g = FormalGroupLaw::<BigRational>::from_series(1, vec![f]).unwrap();
        let el = ExpLog::new(&g).unwrap();
        let checks = el.convergence_checks(&g, 5);
        assert!(!checks[0].passed());
        assert!(!checks[3].passed());
    }
}
