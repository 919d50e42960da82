// Integer coefficients keep every product exact at this precision, so the ring
// identities can be checked with `==`.

use proptest::prelude::*;

use super::{BigComplex, MultiSeries};

const P: u32 = 256;
const ORDER: u32 = 6;

fn series(n_vars: usize, max_deg: u32, order: u32) -> impl Strategy<Value = MultiSeries> {
    let exp = proptest::collection::vec(0..=max_deg, n_vars).prop_filter("degree", move |e| e.iter().sum::<u32>() <= max_deg);
    proptest::collection::vec((exp, -4i64..=4, -4i64..=4), 0..8).prop_map(move |ts| {
        MultiSeries::from_terms(n_vars, order, P, ts.into_iter().map(|(e, re, im)| (e, BigComplex::from_i64(re, im, P)))).unwrap()
    })
}

fn s2() -> impl Strategy<Value = MultiSeries> {
    series(2, ORDER, ORDER)
}

fn point() -> impl Strategy<Value = Vec<BigComplex>> {
    proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 2)
        .prop_map(|v| v.into_iter().map(|(a, b)| BigComplex::from_f64(a, b, P)).collect())
}

fn close(a: &BigComplex, b: &BigComplex) -> bool {
    a.dist(b) < 1e-60
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in s2(), b in s2(), c in s2()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        let one = MultiSeries::constant(BigComplex::one(P), 2, ORDER);
        prop_assert_eq!(a.mul(&one).unwrap(), a.clone());
        prop_assert!(a.add(&a.neg()).unwrap().is_empty());
        prop_assert_eq!(a.sub(&b).unwrap(), a.add(&b.neg()).unwrap());
    }

    #[test]
    fn partials_commute(a in s2()) {
        let xy = a.partial(0).unwrap().partial(1).unwrap();
        let yx = a.partial(1).unwrap().partial(0).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn leibniz_below_the_cut(a in s2(), b in s2(), k in 0usize..2) {
        let lhs = a.mul(&b).unwrap().partial(k).unwrap().with_order(ORDER - 1);
        let rhs = a.partial(k).unwrap().mul(&b).unwrap().add(&a.mul(&b.partial(k).unwrap()).unwrap()).unwrap().with_order(ORDER - 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compose_matches_eval(
        f in series(2, 3, 9),
        g0 in series(2, 3, 9),
        g1 in series(2, 3, 9),
        x in point(),
    ) {
        // substitutes must vanish at the origin
        let strip = |g: MultiSeries| g.sub(&MultiSeries::constant(g.constant_term(), 2, 9)).unwrap();
        let subs = [strip(g0), strip(g1)];
        let composed = f.compose(&subs).unwrap();
        let inner: Vec<BigComplex> = subs.iter().map(|g| g.eval(&x).unwrap()).collect();
        prop_assert!(close(&composed.eval(&x).unwrap(), &f.eval(&inner).unwrap()));
    }

    #[test]
    fn eval_is_a_ring_map(a in series(2, 3, ORDER), b in series(2, 3, ORDER), x in point()) {
        let ea = a.eval(&x).unwrap();
        let eb = b.eval(&x).unwrap();
        prop_assert!(close(&a.add(&b).unwrap().eval(&x).unwrap(), &(ea.clone() + &eb)));
        prop_assert!(close(&a.mul(&b).unwrap().eval(&x).unwrap(), &(ea * &eb)));
    }
}
