//! Zero counting for p-adic power series on closed balls.
//!
//! Radii are `r = p^{-rho}` with `rho` a positive rational, so every norm
//! comparison reduces to comparing rational exponents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Check;
use crate::rings::arith::{floor_rat, rat_int};
use crate::rings::{PadicNum, Valuation};
use crate::series::TruncSeries;

/// Control of the coefficients beyond the truncation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TailGuard {
    /// The series is a polynomial; nothing lies beyond the stored terms.
    Polynomial,
    /// `|a_j| <= p^{mu (j - 1)}` for every `j`, i.e. `v(a_j) >= -mu (j - 1)`.
    Factorial { mu: String },
}

impl TailGuard {
    pub fn factorial(mu: &BigRational) -> Self {
        TailGuard::Factorial { mu: mu.to_string() }
    }

    fn mu(&self) -> Result<Option<BigRational>> {
        match self {
            TailGuard::Polynomial => Ok(None),
            TailGuard::Factorial { mu } => crate::scalar::parse_rational(mu).map(Some),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroReport {
    pub nu: u32,
    /// `|h|_r` written as `p^-k`.
    pub h_norm_at_r: String,
    pub hypothesis_checks: Vec<Check>,
    pub bound_real: String,
    #[serde(serialize_with = "crate::report::as_string")]
    pub bound_floor: BigInt,
}

fn weight(v: i64, rho: &BigRational, j: u32) -> BigRational {
    rat_int(v) + rho * rat_int(j)
}

/// `nu(h, r)` for `r = p^{-rho}`: the number of zeros of `h` in the closed
/// ball of radius `r`, counted with multiplicity, is at most `nu`.
pub fn zero_bound_1var(
    h: &TruncSeries<PadicNum>,
    rho: &BigRational,
    tail: Option<&TailGuard>,
) -> Result<ZeroReport> {
    if h.nvars() != 1 {
        return Err(Error::usage("zero_bound_1var expects a one-variable series"));
    }
    if !rho.is_positive() {
        return Err(Error::usage("radius must satisfy 0 < r < 1"));
    }
    let tail = tail.ok_or_else(|| {
        Error::usage("no tail certificate: supply a polynomial or factorial-growth guard")
    })?;
    let p = h.ctx().prime();
    let mut best: Option<(BigRational, u32)> = None;
    for (e, c) in h.terms() {
        let Valuation::Finite(v) = c.valuation() else {
            continue;
        };
        let w = weight(v, rho, e[0]);
        best = match best {
            None => Some((w, e[0])),
            Some((bw, bj)) => {
                if w < bw || (w == bw && e[0] > bj) {
                    Some((w, e[0]))
                } else {
                    Some((bw, bj))
                }
            }
        };
    }
    let (min_w, nu) = best.ok_or_else(|| {
        Error::Precision("every known coefficient is indistinguishable from zero".into())
    })?;
    let mut checks = Vec::new();
    if let Some(mu) = tail.mu()? {
        if rho <= &mu {
            return Err(Error::usage(format!(
                "radius p^-{rho} is not inside the convergence radius p^-{mu} of the tail guard"
            )));
        }
        let t = h.order();
        // v(a_j) + rho j >= rho j - mu (j - 1), increasing in j since rho > mu
        let tail_w = rho * rat_int(t + 1) - &mu * rat_int(t);
        let ok = tail_w > min_w;
        checks.push(Check::new(
            "tail_guard",
            ok,
            format!("terms beyond degree {t} have weight >= {tail_w} > {min_w}"),
        ));
        if !ok {
            return Err(Error::Inconclusive(format!(
                "tail beyond degree {t} may reach |h|_r (weight {tail_w} <= {min_w}); raise the order"
            )));
        }
    } else {
        checks.push(Check::new("tail_guard", true, "polynomial input"));
    }
    Ok(ZeroReport {
        nu,
        h_norm_at_r: format!("{p}^-{min_w}"),
        hypothesis_checks: checks,
        bound_real: nu.to_string(),
        bound_floor: BigInt::from(nu),
    })
}

/// Growth constant `M` in the multivariable estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Growth {
    /// `M = p^mu`.
    PowerOfP(BigRational),
    /// Any rational `M >= 1`.
    Rational(BigRational),
}

/// `lambda = log M / log r^{-1}`, exact when `M` is a power of `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Lambda {
    Exact { value: String },
    Interval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MvZeroReport {
    pub lambda: Lambda,
    pub witness_j: u32,
    pub hypothesis_checks: Vec<Check>,
    /// `(N - lambda)/(1 - lambda)`; an upper endpoint when `lambda` is only
    /// bracketed.
    pub bound_real: String,
    #[serde(serialize_with = "crate::report::as_string")]
    pub bound_floor: BigInt,
}

/// `(N - lambda)/(1 - lambda)` and its floor.
pub fn disk_formula(n: u32, lambda: &BigRational) -> Result<(BigRational, BigInt)> {
    let one = rat_int(1);
    if lambda >= &one {
        return Err(Error::hypothesis(
            "lambda_below_one",
            format!("lambda = {lambda} >= 1, the estimate is undefined"),
        ));
    }
    let b = (rat_int(n) - lambda) / (&one - lambda);
    let f = floor_rat(&b);
    Ok((b, f))
}

/// `1 + m (1 - lambda)^{-1}`.
pub fn jet_formula(m: u32, lambda: &BigRational) -> Result<BigRational> {
    let one = rat_int(1);
    if lambda >= &one {
        return Err(Error::hypothesis("lambda_below_one", format!("lambda = {lambda} >= 1")));
    }
    Ok(&one + rat_int(m) / (&one - lambda))
}

fn pow_rat(x: &BigRational, k: i64) -> BigRational {
    let r = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        r.recip()
    } else {
        r
    }
}

fn norm_leq_growth(p: u64, v: i64, growth: &Growth, k: i64) -> bool {
    match growth {
        // p^{-v} <= p^{mu (k-1)}
        Growth::PowerOfP(mu) => rat_int(-v) <= mu * rat_int(k - 1),
        Growth::Rational(m) => crate::rings::padic::norm_of_valuation(p, v) <= pow_rat(m, k - 1),
    }
}

/// Multivariable zero estimate along the line `z u`.
pub fn mv_zero_bound(
    h: &TruncSeries<PadicNum>,
    u: &[PadicNum],
    growth: &Growth,
    n: u32,
    rho: &BigRational,
) -> Result<MvZeroReport> {
    if u.len() != h.nvars() {
        return Err(Error::usage(format!(
            "direction has {} coordinates, series has {} variables",
            u.len(),
            h.nvars()
        )));
    }
    if !rho.is_positive() {
        return Err(Error::usage("radius must satisfy 0 < r < 1"));
    }
    let p = h.ctx().prime();
    let mut checks = Vec::new();

    let (m_ok, radius_ok) = match growth {
        Growth::PowerOfP(mu) => (!mu.is_negative(), rho > mu),
        Growth::Rational(m) => {
            // r < 1/M  <=>  M^b < p^a for rho = a/b
            let a = rho.numer().to_u32().ok_or_else(|| Error::usage("radius exponent too large"))?;
            let b = rho.denom().to_usize().ok_or_else(|| Error::usage("radius exponent too large"))?;
            let lhs = num_traits::pow(m.clone(), b);
            let rhs = BigRational::from_integer(crate::rings::arith::pow_big(p, a));
            (m >= &rat_int(1), lhs < rhs)
        }
    };
    checks.push(Check::new("growth_at_least_one", m_ok, "M >= 1"));
    checks.push(Check::new("radius_inside", radius_ok, "0 < r < 1/M"));
    if !m_ok || !radius_ok {
        return Err(Error::hypothesis("growth_and_radius", "need M >= 1 and r < 1/M"));
    }

    for (e, c) in h.terms() {
        if let Valuation::Finite(v) = c.valuation() {
            let k: u32 = e.iter().sum();
            if !norm_leq_growth(p, v, growth, k as i64) {
                return Err(Error::hypothesis(
                    "coefficient_growth",
                    format!("|c_alpha| > M^(|alpha|-1) at alpha = {e:?} (valuation {v})"),
                ));
            }
        }
    }
    checks.push(Check::new(
        "coefficient_growth",
        true,
        format!("|c_alpha| <= M^(|alpha|-1) for all {} stored terms", h.len()),
    ));

    let line = h.restrict_to_line(u)?;
    let witness = (0..=n.min(h.order())).find(|&j| {
        line.coeff(&[j])
            .valuation()
            .finite()
            .is_some_and(|v| v <= 0)
    });
    let Some(j) = witness else {
        return Err(Error::hypothesis(
            "unit_coefficient",
            format!("no j <= {n} with |P_j(u)| >= 1"),
        ));
    };
    checks.push(Check::new("unit_coefficient", true, format!("|P_{j}(u)| >= 1")));

    match growth {
        Growth::PowerOfP(mu) => {
            let lambda = mu / rho;
            let (b, f) = disk_formula(n, &lambda)?;
            let alt = jet_formula(n - 1, &lambda)?;
            checks.push(Check::new(
                "formula_identity",
                alt == b,
                format!("(N-lambda)/(1-lambda) = 1 + (N-1)/(1-lambda) = {b}"),
            ));
            Ok(MvZeroReport {
                lambda: Lambda::Exact {
                    value: lambda.to_string(),
                },
                witness_j: j,
                hypothesis_checks: checks,
                bound_real: b.to_string(),
                bound_floor: f,
            })
        }
        Growth::Rational(m) => {
            let (lo, hi) = lambda_interval(m, rho, p);
            if hi >= 1.0 {
                return Err(Error::Inconclusive(format!(
                    "lambda bracket [{lo}, {hi}] reaches 1"
                )));
            }
            let up = |x: f64| x.next_up();
            let bound = up(up(n as f64 - lo) / (1.0 - hi).next_down());
            Ok(MvZeroReport {
                lambda: Lambda::Interval { lo, hi },
                witness_j: j,
                hypothesis_checks: checks,
                bound_real: format!("{bound:e}"),
                bound_floor: BigInt::from(bound.floor() as i64),
            })
        }
    }
}

/// Outward-rounded bracket of `ln M / (rho ln p)`.
fn lambda_interval(m: &BigRational, rho: &BigRational, p: u64) -> (f64, f64) {
    let mf = m.to_f64().unwrap();
    let rf = rho.to_f64().unwrap();
    let lnm = mf.ln();
    let lnp = (p as f64).ln();
    let slack = |x: f64| x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE;
    let den_lo = rf * lnp - slack(rf * lnp);
    let den_hi = rf * lnp + slack(rf * lnp);
    let num_lo = (lnm - slack(lnm)).max(0.0);
    let num_hi = lnm + slack(lnm);
    let lo = (num_lo / den_hi).next_down().max(0.0);
    let hi = (num_hi / den_lo).next_up();
    (lo, hi)
}

/// Number of zeros in the closed ball of radius `p^{-rho}` predicted by the
/// Newton polygon, for cross-checking `zero_bound_1var` on polynomials.
pub fn nu_of_coeffs(vals: &[Valuation], rho: &BigRational) -> Option<u32> {
    let mut best: Option<(BigRational, u32)> = None;
    for (j, v) in vals.iter().enumerate() {
        if let Valuation::Finite(v) = v {
            let w = weight(*v, rho, j as u32);
            if best.as_ref().is_none_or(|(bw, _)| w <= *bw) {
                best = Some((w, j as u32));
            }
        }
    }
    best.map(|b| b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::arith::rat;
    use crate::rings::Padic;

    fn series(p: u64, coeffs: &[i64]) -> TruncSeries<PadicNum> {
        let k = Padic::new(p, 12).unwrap();
        let c: Vec<PadicNum> = coeffs.iter().map(|&x| k.from_int(&BigInt::from(x))).collect();
        TruncSeries::from_univariate(&k, coeffs.len() as u32 - 1, &c)
    }

    #[test]
    fn nu_examples() {
        let one = rat_int(1);
        let poly = TailGuard::Polynomial;
        // z^2 - p: no roots in pZ_p
        let r = zero_bound_1var(&series(5, &[-5, 0, 1]), &one, Some(&poly)).unwrap();
        assert_eq!(r.nu, 0);
        // z^2 - p z: roots 0 and p
        let r = zero_bound_1var(&series(7, &[0, -7, 1]), &one, Some(&poly)).unwrap();
        assert_eq!(r.nu, 2);
        assert_eq!(r.h_norm_at_r, "7^-2");
        let r = zero_bound_1var(&series(5, &[3]), &one, Some(&poly)).unwrap();
        assert_eq!(r.nu, 0);
    }

    #[test]
    fn missing_guard_and_zero_input() {
        let one = rat_int(1);
        assert!(matches!(
            zero_bound_1var(&series(5, &[1, 1]), &one, None),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            zero_bound_1var(&series(5, &[0, 0]), &one, Some(&TailGuard::Polynomial)),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn factorial_guard() {
        // e^z - 1 type growth: v(a_j) >= -(j-1)/(p-1)
        let g = TailGuard::factorial(&rat(1, 4));
        let r = zero_bound_1var(&series(5, &[0, 1, 1, 1]), &rat_int(1), Some(&g)).unwrap();
        assert_eq!(r.nu, 1);
        assert!(zero_bound_1var(&series(5, &[0, 1]), &rat(1, 5), Some(&g)).is_err());
    }

    #[test]
    fn disk_formula_values() {
        let (b, f) = disk_formula(3, &rat(1, 6)).unwrap();
        assert_eq!(b, rat(17, 5));
        assert_eq!(f, BigInt::from(3));
        assert_eq!(disk_formula(1, &rat(2, 7)).unwrap().0, rat_int(1));
        assert_eq!(jet_formula(2, &rat(1, 6)).unwrap(), rat(17, 5));
    }

    #[test]
    fn mv_bound_on_exp_like_series() {
        let k = Padic::new(7, 12).unwrap();
        let t = TruncSeries::var(&k, 2, 6, 0);
        let s = TruncSeries::var(&k, 2, 6, 1);
        let h = t.scale(&k.from_int(&BigInt::from(7))).add(&s.pow(3));
        let u = [k.from_int(&BigInt::from(7)), k.from_int(&BigInt::from(1))];
        let r = mv_zero_bound(&h, &u, &Growth::PowerOfP(rat(1, 6)), 3, &rat_int(1)).unwrap();
        assert_eq!(r.bound_real, "17/5");
        assert_eq!(r.bound_floor, BigInt::from(3));
        let bad = [k.from_int(&BigInt::from(7)), k.from_int(&BigInt::from(7))];
        assert!(matches!(
            mv_zero_bound(&h, &bad, &Growth::PowerOfP(rat(1, 6)), 3, &rat_int(1)),
            Err(Error::Hypothesis { .. })
        ));
        let r = mv_zero_bound(&h, &u, &Growth::Rational(rat(3, 2)), 3, &rat_int(1)).unwrap();
        assert!(matches!(r.lambda, Lambda::Interval { .. }));
        assert!(r.bound_floor >= BigInt::from(3));
    }
}
