use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::report::Check;
use crate::rings::arith::rat_valuation;
use crate::scalar::{Field, Ring};
use crate::series::TruncSeries;

/// Weierstrass coefficients `[a1, a2, a3, a4, a6]`.
pub type Weierstrass = [BigRational; 5];

#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    Additive(usize),
    Multiplicative,
    Elliptic(Weierstrass),
    Product(Box<LawKind>, Box<LawKind>),
    Custom,
}

/// Commutative formal group law of dimension `n`: `n` series in
/// `x_1..x_n, y_1..y_n`, truncated at total degree `order`.
#[derive(Debug, Clone)]
pub struct FormalGroupLaw<S: Ring> {
    pub kind: LawKind,
    n: usize,
    order: u32,
    f: Vec<TruncSeries<S>>,
}

impl<S: Field> FormalGroupLaw<S> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ctx(&self) -> &S::Ctx {
        self.f[0].ctx()
    }

    pub fn series(&self) -> &[TruncSeries<S>] {
        &self.f
    }

    pub fn additive(ctx: &S::Ctx, n: usize, order: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("dimension must be positive"));
        }
        let f = (0..n)
            .map(|j| TruncSeries::var(ctx, 2 * n, order, j).add(&TruncSeries::var(ctx, 2 * n, order, n + j)))
            .collect();
        Ok(FormalGroupLaw {
            kind: LawKind::Additive(n),
            n,
            order,
            f,
        })
    }

    /// `x + y + xy`.
    pub fn multiplicative(ctx: &S::Ctx, order: u32) -> Self {
        let x = TruncSeries::var(ctx, 2, order, 0);
        let y = TruncSeries::var(ctx, 2, order, 1);
        FormalGroupLaw {
            kind: LawKind::Multiplicative,
            n: 1,
            order,
            f: vec![x.add(&y).add(&x.mul(&y))],
        }
    }

    /// Formal group of `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` in the
    /// parameter `z = -x/y`.
    ///
    /// With `reduction_prime` set, the coefficients must be integral at `p`
    /// and the discriminant a unit.
    pub fn elliptic(ctx: &S::Ctx, a: &Weierstrass, order: u32, reduction_prime: Option<u64>) -> Result<Self> {
        if let Some(p) = reduction_prime {
            for (name, c) in ["a1", "a2", "a3", "a4", "a6"].iter().zip(a) {
                if rat_valuation(c, p).is_some_and(|v| v < 0) {
                    return Err(Error::usage(format!("{name} = {c} is not {p}-integral")));
                }
            }
            let d = discriminant(a);
            match rat_valuation(&d, p) {
                Some(0) => {}
                _ => {
                    return Err(Error::usage(format!(
                        "discriminant {d} is not a {p}-adic unit (bad reduction)"
                    )))
                }
            }
        } else if Zero::is_zero(&discriminant(a)) {
            return Err(Error::usage("singular Weierstrass equation"));
        }
        let c = |r: &BigRational| -> Result<S> { rational_into::<S>(ctx, r) };
        let [a1, a2, a3, a4, a6] = [c(&a[0])?, c(&a[1])?, c(&a[2])?, c(&a[3])?, c(&a[4])?];

        // the degree-d part of lambda needs the z^{d+1} coefficient of w
        let w = w_series(ctx, [&a1, &a2, &a3, &a4, &a6], order + 1);
        let wc = w.univariate_coeffs();
        let w = w.truncate(order);
        let z1 = TruncSeries::var(ctx, 2, order, 0);
        let z2 = TruncSeries::var(ctx, 2, order, 1);

        // lambda = sum A_n h_{n-1}(z1, z2), h the complete homogeneous sums
        let mut lambda = TruncSeries::zero(ctx, 2, order);
        for (n, an) in wc.iter().enumerate() {
            if n == 0 || an.is_zero() {
                continue;
            }
            let k = (n - 1) as u32;
            for i in 0..=k {
                lambda.add_term(vec![i, k - i], an.clone());
            }
        }
        let w1 = w.compose(std::slice::from_ref(&z1))?;
        let nu = w1.sub(&lambda.mul(&z1));
        let l2 = lambda.mul(&lambda);
        let l3 = l2.mul(&lambda);
        // z1 + z2 + z3 = -(z^2 coefficient)/(z^3 coefficient) of the cubic
        // obtained by substituting w = lambda z + nu
        let num = lambda
            .scale(&a1)
            .add(&l2.scale(&a3))
            .add(&nu.scale(&a2))
            .add(&lambda.mul(&nu).scale(&a4).mul_int(2))
            .add(&l2.mul(&nu).scale(&a6).mul_int(3));
        let den = TruncSeries::one(ctx, 2, order)
            .add(&lambda.scale(&a2))
            .add(&l2.scale(&a4))
            .add(&l3.scale(&a6));
        let z3 = num.mul(&den.inverse()?).add(&z1).add(&z2).neg();
        let w3 = lambda.mul(&z3).add(&nu);
        let inv_den = TruncSeries::one(ctx, 2, order)
            .neg()
            .add(&z3.scale(&a1))
            .add(&w3.scale(&a3));
        let f = z3.mul(&inv_den.inverse()?);
        Ok(FormalGroupLaw {
            kind: LawKind::Elliptic(a.clone()),
            n: 1,
            order,
            f: vec![f],
        })
    }

    /// Law given directly by its `n` series in `2n` variables; the axioms are
    /// not checked here.
    pub fn from_series(n: usize, f: Vec<TruncSeries<S>>) -> Result<Self> {
        if n == 0 || f.len() != n || f.iter().any(|s| s.nvars() != 2 * n) {
            return Err(Error::usage(format!("a law of dimension {n} needs {n} series in {} variables", 2 * n)));
        }
        let order = f.iter().map(|s| s.order()).min().unwrap_or(0);
        let f = f.into_iter().map(|s| s.with_order(order)).collect();
        Ok(FormalGroupLaw {
            kind: LawKind::Custom,
            n,
            order,
            f,
        })
    }

    /// Block-diagonal product `G1 x G2`.
    pub fn product(g1: &Self, g2: &Self) -> Self {
        let (n1, n2) = (g1.n, g2.n);
        let n = n1 + n2;
        let order = g1.order.min(g2.order);
        let map1: Vec<usize> = (0..n1).chain(n..n + n1).collect();
        let map2: Vec<usize> = (n1..n).chain(n + n1..2 * n).collect();
        let f = g1
            .f
            .iter()
            .map(|s| s.embed(2 * n, &map1).truncate(order))
            .chain(g2.f.iter().map(|s| s.embed(2 * n, &map2).truncate(order)))
            .collect();
        FormalGroupLaw {
            kind: LawKind::Product(Box::new(g1.kind.clone()), Box::new(g2.kind.clone())),
            n,
            order,
            f,
        }
    }

    /// `F(a, b)` for `n`-tuples of series in a common set of variables.
    pub fn apply(&self, a: &[TruncSeries<S>], b: &[TruncSeries<S>]) -> Result<Vec<TruncSeries<S>>> {
        let subs: Vec<TruncSeries<S>> = a.iter().chain(b).cloned().collect();
        self.f.iter().map(|fj| fj.compose(&subs)).collect()
    }

    fn vars(&self, total: usize, offset: usize) -> Vec<TruncSeries<S>> {
        (0..self.n)
            .map(|i| TruncSeries::var(self.ctx(), total, self.order, offset + i))
            .collect()
    }

    /// Identity, commutativity and associativity to the truncation order.
    pub fn axiom_checks(&self) -> Result<Vec<Check>> {
        let n = self.n;
        let x = self.vars(2 * n, 0);
        let y = self.vars(2 * n, n);
        let zero2 = vec![TruncSeries::zero(self.ctx(), 2 * n, self.order); n];
        let left_id = self.apply(&x, &zero2)? == x;
        let right_id = self.apply(&zero2, &y)? == y;
        let comm = self.apply(&y, &x)? == self.f;

        let x3 = self.vars(3 * n, 0);
        let y3 = self.vars(3 * n, n);
        let z3 = self.vars(3 * n, 2 * n);
        let lhs = self.apply(&self.apply(&x3, &y3)?, &z3)?;
        let rhs = self.apply(&x3, &self.apply(&y3, &z3)?)?;
        let assoc = lhs == rhs;
        let t = self.order;
        Ok(vec![
            Check::new("identity", left_id && right_id, format!("F(x,0) = x and F(0,y) = y to order {t}")),
            Check::new("commutativity", comm, format!("F(x,y) = F(y,x) to order {t}")),
            Check::new("associativity", assoc, format!("F(F(x,y),z) = F(x,F(y,z)) to order {t}")),
        ])
    }
}

/// Embeds a rational in `S`, failing on a denominator that `S` cannot invert.
pub fn rational_into<S: Field>(ctx: &S::Ctx, r: &BigRational) -> Result<S> {
    let num = S::from_integer(ctx, r.numer());
    let den = S::from_integer(ctx, r.denom());
    num.div_ref(&den)
}

/// `w(z) = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3`, solved by
/// fixed-point iteration (each pass fixes at least one more degree).
pub fn w_series<S: Ring>(ctx: &S::Ctx, a: [&S; 5], order: u32) -> TruncSeries<S> {
    let [a1, a2, a3, a4, a6] = a;
    let z = TruncSeries::var(ctx, 1, order, 0);
    let z2 = z.mul(&z);
    let z3 = z2.mul(&z);
    let mut w = z3.clone();
    for _ in 0..=order {
        let w2 = w.mul(&w);
        let next = z3
            .add(&z.mul(&w).scale(a1))
            .add(&z2.mul(&w).scale(a2))
            .add(&w2.scale(a3))
            .add(&z.mul(&w2).scale(a4))
            .add(&w2.mul(&w).scale(a6));
        if next == w {
            break;
        }
        w = next;
    }
    w
}

/// Discriminant of a general Weierstrass equation.
pub fn discriminant(a: &Weierstrass) -> BigRational {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + a2 * BigRational::from_integer(4.into());
    let b4 = a1 * a3 + a4 * BigRational::from_integer(2.into());
    let b6 = a3 * a3 + a6 * BigRational::from_integer(4.into());
    let b8 = a1 * a1 * a6 + a2 * a6 * BigRational::from_integer(4.into()) - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let k = |n: i64| BigRational::from_integer(BigInt::from(n));
    -(&b2 * &b2 * &b8) - k(8) * &b4 * &b4 * &b4 - k(27) * &b6 * &b6 + k(9) * &b2 * &b4 * &b6
}

pub fn parse_weierstrass(s: &str) -> Result<Weierstrass> {
    let parts = s
        .split(',')
        .map(crate::scalar::parse_rational)
        .collect::<Result<Vec<_>>>()?;
    let arr: [BigRational; 5] = parts
        .try_into()
        .map_err(|v: Vec<_>| Error::usage(format!("expected 5 Weierstrass coefficients, got {}", v.len())))?;
    Ok(arr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::arith::rat_int;
    use crate::rings::{Padic, PadicNum};

    type QpLaw = FormalGroupLaw<PadicNum>;

    fn weier(v: [i64; 5]) -> Weierstrass {
        v.map(rat_int)
    }

    #[test]
    fn discriminants() {
        // y^2 + y = x^3 has discriminant -27
        assert_eq!(discriminant(&weier([0, 0, 1, 0, 0])), rat_int(-27));
        // y^2 = x^3 - x has discriminant 64
        assert_eq!(discriminant(&weier([0, 0, 0, -1, 0])), rat_int(64));
    }

    #[test]
    fn w_series_leading_terms() {
        // y^2 = x^3 + a4 x + a6: w = z^3 + a4 z^7 + a6 z^9 + ...
        let a4 = rat_int(-1);
        let zero = rat_int(0);
        let w = w_series(&(), [&zero, &zero, &zero, &a4, &zero], 9);
        assert_eq!(w.coeff(&[3]), rat_int(1));
        assert_eq!(w.coeff(&[7]), rat_int(-1));
        assert_eq!(w.coeff(&[5]), rat_int(0));
    }

    #[test]
    fn rational_axioms() {
        let g = FormalGroupLaw::<BigRational>::elliptic(&(), &weier([1, -1, 1, 0, 2]), 7, None).unwrap();
        for c in g.axiom_checks().unwrap() {
            assert!(c.passed(), "{c:?}");
        }
        let m = FormalGroupLaw::<BigRational>::multiplicative(&(), 6);
        let p = FormalGroupLaw::product(&m, &g);
        assert_eq!(p.dim(), 2);
        for c in p.axiom_checks().unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn bad_reduction_rejected() {
        let k = Padic::new(3, 10).unwrap();
        // discriminant -27 is divisible by 3
        assert!(QpLaw::elliptic(&k, &weier([0, 0, 1, 0, 0]), 6, Some(3)).is_err());
        let half = [rat_int(0), rat_int(0), BigRational::new(1.into(), 5.into()), rat_int(0), rat_int(0)];
        let k5 = Padic::new(5, 10).unwrap();
        assert!(QpLaw::elliptic(&k5, &half, 6, Some(5)).is_err());
        assert!(QpLaw::elliptic(&k5, &weier([0, 0, 1, 0, 0]), 6, Some(5)).is_ok());
    }

    #[test]
    fn elliptic_law_leading_terms() {
        // y^2 + y = x^3: F(x,y) = x + y - 2 x^3 y ... has no quadratic part
        let g = FormalGroupLaw::<BigRational>::elliptic(&(), &weier([0, 0, 1, 0, 0]), 6, None).unwrap();
        let f = &g.series()[0];
        assert_eq!(f.coeff(&[1, 0]), rat_int(1));
        assert_eq!(f.coeff(&[0, 1]), rat_int(1));
        assert_eq!(f.coeff(&[1, 1]), rat_int(0));
    }
}
