use chabauty::fgroup::FormalGroupLaw;
use chabauty::report::Status;
use chabauty::rings::arith::rat_int;
use chabauty::zeroest::{zero_bound_1var, TailGuard};
use chabauty::{Padic, RatSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const ORDER: u32 = 5;

fn series(terms: Vec<((u32, u32), i64)>) -> RatSeries {
    RatSeries::from_terms(&(), 2, ORDER, terms.into_iter().map(|((a, b), c)| (vec![a, b], rat_int(c)))).unwrap()
}

fn arb_series() -> impl Strategy<Value = RatSeries> {
    prop::collection::vec(((0u32..4, 0u32..4), -9i64..10), 0..8).prop_map(series)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(s in arb_series()) {
        let text = s.to_text();
        let back = RatSeries::parse(&(), 2, ORDER, &text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert!(back.sub(&s).is_zero());
    }

    #[test]
    fn multiplication_is_a_commutative_ring(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).is_zero());
        prop_assert!(a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).is_zero());
        prop_assert!(a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c))).is_zero());
    }

    #[test]
    fn elliptic_laws_satisfy_axioms(a in prop::array::uniform5(-3i64..4)) {
        let w = a.map(rat_int);
        prop_assume!(!num_traits::Zero::is_zero(&chabauty::fgroup::discriminant(&w)));
        let g = FormalGroupLaw::<BigRational>::elliptic(&(), &w, 6, None).unwrap();
        for c in g.axiom_checks().unwrap() {
            prop_assert_eq!(c.status, Status::Pass, "{}", c.detail);
        }
    }

    #[test]
    fn zero_bound_sees_planted_root(a in -20i64..20, g in prop::collection::vec(-30i64..30, 1..5)) {
        // h(z) = (z - 5a) g(z) has the root 5a in the unit ball 5Z_5.
        prop_assume!(g.iter().any(|&c| c != 0));
        let ctx = Padic::new(5, 40).unwrap();
        let mut coeffs = vec![0i64; g.len() + 1];
        for (i, &c) in g.iter().enumerate() {
            coeffs[i + 1] += c;
            coeffs[i] -= 5 * a * c;
        }
        let h = chabauty::QpSeries::from_terms(
            &ctx,
            1,
            coeffs.len() as u32,
            coeffs.iter().enumerate().map(|(i, &c)| (vec![i as u32], ctx.from_int(&BigInt::from(c)))),
        )
        .unwrap();
        let r = zero_bound_1var(&h, &rat_int(1), Some(&TailGuard::Polynomial)).unwrap();
        prop_assert!(r.nu >= 1);
        prop_assert!(r.nu as usize <= g.len());
    }
}
