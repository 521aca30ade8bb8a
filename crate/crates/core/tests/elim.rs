use std::time::Instant;

use num_bigint::BigInt;
use proptest::prelude::*;
use treewilf_core::elim::certificate;
use treewilf_core::systems::avoidance_system;
use treewilf_core::{
    annihilates, av_series, eliminate, poly_divides, Alphabet, BivarPoly, EliminationOptions, Error, PatternSet,
};

fn set(words: &str) -> PatternSet {
    PatternSet::parse(Alphabet::binary(), words).unwrap()
}

#[test]
fn elimination_order_does_not_change_the_result() {
    for words in ["", "mxx", "mmxxx", "mxmxx", "mmxxmxx", "mmmxxxx", "mmxxx,mxmxx"] {
        let sys = avoidance_system(&set(words)).unwrap();
        let default = eliminate(&sys, &EliminationOptions::default()).unwrap();
        let reversed: Vec<usize> = (0..sys.len()).rev().collect();
        let other = eliminate(&sys, &EliminationOptions { order: Some(reversed), ..Default::default() }).unwrap();
        assert_eq!(default, other, "{words:?}");
    }
}

#[test]
fn eliminated_polynomials_annihilate_the_series() {
    for word in ["mxx", "mmxxx", "mxmxx", "mmxxmxx", "mmmxxxx", "mmxmxxx"] {
        let sys = avoidance_system(&set(word)).unwrap();
        let p = eliminate(&sys, &EliminationOptions::default()).unwrap();
        let s = av_series(&treewilf_core::Tree::parse(word, &Alphabet::binary()).unwrap(), 60).unwrap();
        assert!(annihilates(&p, &s, 60), "{word}: {p}");
    }
}

#[test]
fn resource_limits() {
    let sys = avoidance_system(&set("mmxxmxx")).unwrap();
    let small = EliminationOptions { max_unknowns: 1, ..Default::default() };
    assert!(matches!(eliminate(&sys, &small), Err(Error::Bound(_))));
    let late = EliminationOptions { deadline: Some(Instant::now()), ..Default::default() };
    assert!(matches!(eliminate(&sys, &late), Err(Error::Deadline)));
}

#[test]
fn certificate_pair() {
    let (p, q) = (certificate::quintic(), certificate::quartic());
    assert_eq!(p.degree_g(), Some(5));
    assert_eq!(q.degree_g(), Some(4));
    assert!(poly_divides(&p, &q).unwrap());
    assert!(!poly_divides(&q, &p).unwrap());
    assert!(certificate::check(100).unwrap().passed());
}

fn small_poly() -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((0usize..4, 0usize..3, -3i64..=3), 1..5)
        .prop_map(|terms| BivarPoly::from_terms(terms.into_iter().map(|(n, g, c)| (n, g, BigInt::from(c)))))
        .prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisibility_transfers_annihilation(r in small_poly()) {
        let s = av_series(&treewilf_core::Tree::parse(certificate::WITNESS, &Alphabet::binary()).unwrap(), 60).unwrap();
        let q = certificate::quartic();
        let p = q.mul(&r);
        prop_assert!(poly_divides(&p, &q).unwrap());
        prop_assert!(annihilates(&q, &s, 60));
        prop_assert!(annihilates(&p, &s, 60));
    }

    #[test]
    fn catalan_products(r in small_poly()) {
        let cat = BivarPoly::parse("x*G^2 - G + x").unwrap();
        let p = cat.mul(&r);
        prop_assert!(poly_divides(&p, &cat).unwrap());
        prop_assert!(poly_divides(&p, &r).unwrap());
        // p + 1 leaves remainder 1.
        let shifted = p.add(&BivarPoly::from_terms([(0, 0, BigInt::from(1))]));
        prop_assert!(!poly_divides(&shifted, &cat).unwrap());
    }

    #[test]
    fn text_round_trip(p in small_poly()) {
        prop_assert_eq!(BivarPoly::parse(&p.to_text()).unwrap(), p);
    }
}
