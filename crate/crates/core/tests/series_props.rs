//! Property tests for the truncated formal series algebra.

use nodal_dt::graph::{CurveClass, DualGraph, VertexId};
use nodal_dt::rational::{rat, Rat};
use nodal_dt::series::{
    series_exp, series_log, series_mul, series_pow, FormalSeries, SeriesContext, TermIndex,
};
use proptest::prelude::*;

const TRUNCATION: u64 = 5;

fn context() -> SeriesContext {
    SeriesContext::new(&DualGraph::cycle_graph(2, 1), TRUNCATION, 12)
}

prop_compose! {
    fn arb_term()(
        a0 in 0..=TRUNCATION,
        a1 in 0..=TRUNCATION,
        n in -3..=3i64,
        p in -6..=6i64,
        q in 1..=4i64,
    ) -> Option<(TermIndex, Rat)> {
        if a0 + a1 == 0 || a0 + a1 > TRUNCATION || p == 0 {
            None
        } else {
            let gamma = CurveClass::from_coeffs([(VertexId(0), a0), (VertexId(1), a1)]);
            Some((TermIndex { n, gamma }, rat(p, q)))
        }
    }
}

/// A series with zero constant term and no pure q-power terms.
fn arb_positive_series() -> impl Strategy<Value = FormalSeries> {
    prop::collection::vec(arb_term(), 0..6).prop_map(|terms| {
        FormalSeries::from_terms(context(), terms.into_iter().flatten()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_exp_round_trip(x in arb_positive_series()) {
        let back = series_log(&series_exp(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn exp_log_round_trip(x in arb_positive_series()) {
        let s = FormalSeries::one(context()).add(&x).unwrap();
        let back = series_exp(&series_log(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn mul_commutes(x in arb_positive_series(), y in arb_positive_series()) {
        prop_assert_eq!(series_mul(&x, &y).unwrap(), series_mul(&y, &x).unwrap());
    }

    #[test]
    fn mul_associates(
        x in arb_positive_series(),
        y in arb_positive_series(),
        z in arb_positive_series(),
    ) {
        let lhs = series_mul(&series_mul(&x, &y).unwrap(), &z).unwrap();
        let rhs = series_mul(&x, &series_mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_turns_sums_into_products(x in arb_positive_series(), y in arb_positive_series()) {
        let lhs = series_exp(&x.add(&y).unwrap()).unwrap();
        let rhs = series_mul(&series_exp(&x).unwrap(), &series_exp(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integer_pow_is_repeated_mul(x in arb_positive_series(), k in 1..=4i64) {
        let s = FormalSeries::one(context()).add(&x).unwrap();
        let via_pow = series_pow(&s, &Rat::from_integer(k.into())).unwrap();
        let mut direct = FormalSeries::one(context());
        for _ in 0..k {
            direct = series_mul(&direct, &s).unwrap();
        }
        prop_assert_eq!(via_pow, direct);
    }
}
