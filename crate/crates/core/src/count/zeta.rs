use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Check;
use crate::rings::arith::rat_int;
use crate::series::TruncSeries;

/// `Z(T) = exp(sum N_n T^n / n)` and `Z*(T) = Z(T) / (1 - T)^{c_D}` mod `T^{B+1}`.
#[derive(Debug, Clone, Serialize)]
pub struct ZetaTruncation {
    pub b: u32,
    pub counts: Vec<u64>,
    pub c_d: u32,
    #[serde(serialize_with = "texts")]
    pub z: Vec<BigRational>,
    #[serde(serialize_with = "texts")]
    pub z_star: Vec<BigRational>,
    /// `N*_n` read back from the logarithmic derivative of `Z*`.
    #[serde(serialize_with = "texts")]
    pub recovered: Vec<BigRational>,
    pub checks: Vec<Check>,
}

fn texts<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Coefficients `c_0..c_B` as text in `T`.
pub fn series_text(c: &[BigRational]) -> String {
    let order = c.len().saturating_sub(1) as u32;
    TruncSeries::from_univariate(&(), order, c).to_text_with(&["T"])
}

fn exp_of_counts(counts: &[BigRational]) -> Vec<BigRational> {
    let b = counts.len();
    let mut z = vec![BigRational::one()];
    for n in 1..=b {
        let s: BigRational = (1..=n).map(|k| &counts[k - 1] * &z[n - k]).sum();
        z.push(s / rat_int(n as i64));
    }
    z
}

/// Inverse of [`exp_of_counts`]: `N_n = n z_n - sum_{k<n} N_k z_{n-k}`.
fn counts_of_exp(z: &[BigRational]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::new();
    for n in 1..z.len() {
        let s: BigRational = (1..n).map(|k| &out[k - 1] * &z[n - k]).sum();
        out.push(&z[n] * rat_int(n as i64) - s);
    }
    out
}

pub fn zeta_ops(counts: &[u64], c_d: u32) -> Result<ZetaTruncation> {
    if counts.is_empty() {
        return Err(Error::usage("at least one count N_1 is required"));
    }
    let b = counts.len() as u32;
    let n: Vec<BigRational> = counts.iter().map(|&c| rat_int(c)).collect();
    let z = exp_of_counts(&n);
    let mut z_star = z.clone();
    for _ in 0..c_d {
        // multiply by 1 + T + T^2 + ...
        for i in 1..z_star.len() {
            let prev = z_star[i - 1].clone();
            z_star[i] += prev;
        }
    }
    let recovered = counts_of_exp(&z_star);
    let integral = |v: &[BigRational]| v.iter().all(|x| x.is_integer());
    let shifted = recovered
        .iter()
        .zip(&n)
        .all(|(r, c)| *r == c + rat_int(c_d as i64));
    let checks = vec![
        Check::new(
            "integral_coefficients",
            integral(&z) && integral(&z_star),
            "every coefficient of Z and Z* is an integer",
        ),
        Check::new(
            "log_derivative_recovery",
            shifted,
            format!("T d/dT log Z* returns N_n + {c_d} for n <= {b}"),
        ),
    ];
    Ok(ZetaTruncation {
        b,
        counts: counts.to_vec(),
        c_d,
        z,
        z_star,
        recovered,
        checks,
    })
}

/// Particular solution of `a x = rhs` over `Q` (free variables set to 0).
fn solve(mut a: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        rhs.swap(r, pr);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
                let t = &rhs[r] * &f;
                rhs[i] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

/// `P/Q` with `deg P <= num_deg`, `deg Q <= den_deg`, `Q(0) = 1` matching
/// every given coefficient of `z`; `None` when no such pair exists.
pub fn pade(z: &[BigRational], num_deg: usize, den_deg: usize) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let at = |j: isize| if j < 0 { BigRational::zero() } else { z[j as usize].clone() };
    let top = z.len() as isize - 1;
    // sum_{i=1..m} q_i z_{k-i} = -z_k for num_deg < k <= top
    let ks: Vec<isize> = ((num_deg as isize + 1)..=top).collect();
    let a = ks
        .iter()
        .map(|&k| (1..=den_deg as isize).map(|i| at(k - i)).collect())
        .collect();
    let rhs = ks.iter().map(|&k| -at(k)).collect();
    let tail = if den_deg == 0 {
        ks.iter().all(|&k| at(k).is_zero()).then(Vec::new)?
    } else if ks.is_empty() {
        vec![BigRational::zero(); den_deg]
    } else {
        solve(a, rhs)?
    };
    let mut q = vec![BigRational::one()];
    q.extend(tail);
    let p = (0..=num_deg as isize)
        .map(|j| (0..=den_deg as isize).map(|i| &q[i as usize] * at(j - i)).sum())
        .collect();
    Some((p, q))
}

/// Power series expansion of `p/q` to `len` coefficients.
pub fn expand_ratio(p: &[BigRational], q: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::with_capacity(len);
    for n in 0..len {
        let mut c = p.get(n).cloned().unwrap_or_default();
        for i in 1..q.len().min(n + 1) {
            c -= &q[i] * &out[n - i];
        }
        out.push(c / &q[0]);
    }
    out
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Remainder of `a` modulo `b` (nonzero leading coefficient).
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut b = b.to_vec();
    while b.last().is_some_and(Zero::is_zero) {
        b.pop();
    }
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - 1 - db;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        r.pop();
    }
    r
}

/// Rational shape of `Z*` for a curve with `r` components of the given
/// geometric genera, all split over an extension of degree `d`.
#[derive(Debug, Clone, Serialize)]
pub struct DworkReport {
    pub b: u32,
    #[serde(serialize_with = "texts")]
    pub numerator: Vec<BigRational>,
    #[serde(serialize_with = "texts")]
    pub denominator: Vec<BigRational>,
    pub checks: Vec<Check>,
}

pub fn dwork_check(z: &ZetaTruncation, genera: &[u32], q: u64, d: u32) -> Result<DworkReport> {
    let r = genera.len();
    if r == 0 || d == 0 {
        return Err(Error::usage("need at least one component and d >= 1"));
    }
    let g: usize = genera.iter().map(|&g| g as usize).sum();
    let b = 2 * g + 2 * r + 2;
    if z.z_star.len() < b + 1 {
        return Err(Error::usage(format!(
            "the rationality check needs N_1..N_{b}, only {} given",
            z.z_star.len() - 1
        )));
    }
    let zs = &z.z_star[..=b];
    let Some((num, den)) = pade(zs, 2 * g, 2 * r) else {
        return Ok(DworkReport {
            b: b as u32,
            numerator: Vec::new(),
            denominator: Vec::new(),
            checks: vec![Check::new(
                "pade_fit",
                false,
                format!("no P/Q with deg P <= {} and deg Q <= {} matches Z* mod T^{}", 2 * g, 2 * r, b + 1),
            )],
        });
    };
    let expanded = expand_ratio(&num, &den, b + 1);
    let target: Vec<BigRational> = z.recovered[..b].to_vec();
    let reproduces = counts_of_exp(&expanded) == target;
    // Q must divide (1 - T^d)^r (1 - q^d T^d)^r
    let mut envelope = vec![BigRational::one()];
    let qd = BigInt::from(q).pow(d);
    for _ in 0..r {
        let mut a = vec![BigRational::zero(); d as usize + 1];
        a[0] = BigRational::one();
        a[d as usize] = -BigRational::one();
        let mut c = a.clone();
        c[d as usize] = -BigRational::from_integer(qd.clone());
        envelope = poly_mul(&poly_mul(&envelope, &a), &c);
    }
    let divides = poly_rem(&envelope, &den).iter().all(Zero::is_zero);
    Ok(DworkReport {
        b: b as u32,
        numerator: num,
        denominator: den.clone(),
        checks: vec![
            Check::new("pade_fit", true, format!("deg P <= {}, deg Q <= {}", 2 * g, 2 * r)),
            Check::new("pade_reproduces_counts", reproduces, format!("P/Q gives N*_n for n <= {b}")),
            Check::new(
                "pole_structure",
                divides,
                format!("Q = {} divides (1 - T^{d})^{r} (1 - q^{d} T^{d})^{r}", series_text(&den)),
            ),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_pass;
    use crate::rings::arith::rat;

    #[test]
    fn projective_line() {
        let q = 5u64;
        let counts: Vec<u64> = (1..=6).map(|n| q.pow(n) + 1).collect();
        let z = zeta_ops(&counts, 0).unwrap();
        for n in 0..=6u32 {
            let expect: u64 = (0..=n).map(|i| q.pow(i)).sum();
            assert_eq!(z.z[n as usize], rat_int(expect));
        }
        assert!(all_pass(&z.checks));
        let w = dwork_check(&z, &[0], q, 1).unwrap();
        assert!(all_pass(&w.checks), "{:?}", w.checks);
        assert_eq!(w.denominator, vec![rat(1, 1), rat(-6, 1), rat(5, 1)]);
    }

    #[test]
    fn constant_counts_and_shift() {
        let z = zeta_ops(&[1, 1, 1, 1], 0).unwrap();
        assert!(z.z.iter().all(|c| *c == rat(1, 1)));
        let z2 = zeta_ops(&[1, 1, 1, 1], 2).unwrap();
        assert_eq!(z2.recovered, vec![rat(3, 1); 4]);
        assert!(all_pass(&z2.checks));
        assert_eq!(series_text(&z.z[..3]), "1 + T + T^2");
    }

    #[test]
    fn non_counts_are_flagged() {
        let z = zeta_ops(&[1, 0], 0).unwrap();
        assert!(!z.checks[0].passed());
    }

    #[test]
    fn elliptic_numerator() {
        // y^2 = x^3 + x + 1 over F_5 has 9 points; a = -3
        let q = 5i64;
        let a = -3i64;
        let (mut s0, mut s1) = (2i64, a);
        let mut counts = Vec::new();
        for n in 1..=6u32 {
            counts.push((q.pow(n) + 1 - s1) as u64);
            let s2 = a * s1 - q * s0;
            s0 = s1;
            s1 = s2;
        }
        let z = zeta_ops(&counts, 0).unwrap();
        let w = dwork_check(&z, &[1], 5, 1).unwrap();
        assert!(all_pass(&w.checks));
        assert_eq!(w.numerator, vec![rat(1, 1), rat(3, 1), rat(5, 1)]);
        assert!(dwork_check(&z, &[0], 5, 1).unwrap().checks.iter().any(|c| !c.passed()));
    }
}
