mod common;

use common::binary_patterns;
use treewilf_core::systems::{avoidance_system, compact_enumeration_system, enumeration_system, stamp_system};
use treewilf_core::{av_series, en_series, solve_truncated, to_operad_series, Alphabet, PatternSet, Tree};

fn tree(word: &str) -> Tree {
    Tree::parse(word, &Alphabet::binary()).unwrap()
}

fn small_patterns() -> Vec<Tree> {
    (2..=5).flat_map(binary_patterns).map(|n| tree(&n.word())).collect()
}

#[test]
fn compact_and_truncation_systems_agree() {
    for p in small_patterns() {
        let compact = solve_truncated(&compact_enumeration_system(&p).unwrap(), 31).unwrap();
        let truncation = solve_truncated(&enumeration_system(&p).unwrap(), 31).unwrap();
        assert_eq!(compact.target, truncation.target, "{p}");
    }
}

#[test]
fn avoidance_is_the_y_free_slice() {
    for p in small_patterns() {
        let set = PatternSet::single(Alphabet::binary(), p.clone()).unwrap();
        let av = solve_truncated(&avoidance_system(&set).unwrap(), 41).unwrap();
        let en = en_series(&p, 41).unwrap();
        assert_eq!(av.target.as_uni().unwrap(), &en.at_y_zero(), "{p}");
    }
}

#[test]
fn solving_is_deterministic_and_truncation_stable() {
    for word in ["mmxxx", "mxmmxxx", "mmxxmmxxx"] {
        let sys = compact_enumeration_system(&tree(word)).unwrap();
        let long = solve_truncated(&sys, 40).unwrap();
        let again = solve_truncated(&sys, 40).unwrap();
        assert_eq!(long.target, again.target);
        for k in [1, 7, 20, 39] {
            let short = solve_truncated(&sys, k).unwrap();
            assert_eq!(long.target.truncate(k), short.target, "{word} at {k}");
            for (a, b) in long.unknowns.iter().zip(&short.unknowns) {
                assert_eq!(&a.truncate(k), b);
            }
        }
    }
}

#[test]
fn operad_series_from_avoidance() {
    for p in small_patterns() {
        let set = PatternSet::single(Alphabet::binary(), p.clone()).unwrap();
        let z = solve_truncated(&stamp_system(&set), 20).unwrap().target;
        let from_av = to_operad_series(&av_series(&p, 39).unwrap()).unwrap();
        assert_eq!(z.as_uni().unwrap(), &from_av, "{p}");
    }
    // Associativity: one tree in each arity.
    let ass = to_operad_series(&av_series(&tree("mmxxx"), 21).unwrap()).unwrap();
    assert!((1..=11).all(|k| *ass.coeff(k) == 1.into()));
}

#[test]
fn system_sizes_stay_small() {
    for p in small_patterns() {
        let n = compact_enumeration_system(&p).unwrap().len();
        assert!(n <= 1 << (p.leaf_count() - 1), "{p}: {n} unknowns");
    }
}
