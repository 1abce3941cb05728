//! Property tests tying independent characterizations to each other:
//! catalogue membership vs validation, fairness vs journeys, nesting of
//! prefix simplices, twin involution, and normal-form laws.

use std::collections::BTreeSet;

use num::{BigRational, One, Zero};
use proptest::prelude::*;

use geoiis::adversary::{
    is_fair, journey_exists, Alphabet, InstantGraph, Lasso,
};
use geoiis::classes::{are_geo_equivalent, classify_geo_class, find_twin, Cardinality};
use geoiis::geometry::{geo_lasso, geo_prefix, simplex_contains, word_matrix};
use geoiis::Limits;

fn alpha(n: usize) -> Alphabet {
    Alphabet::generate(n, &Limits::default()).unwrap()
}

#[test]
fn letter_ids_roundtrip_and_respect_the_catalogue_order() {
    for n in 0..=3usize {
        let a = alpha(n);
        let mut previous: Option<Vec<u64>> = None;
        for (id, g) in a.letters().iter().enumerate() {
            assert_eq!(a.id_of(g), Some(id));
            let key = g.view_masks();
            if let Some(p) = &previous {
                assert!(*p < key, "catalogue keys not strictly ascending");
            }
            previous = Some(key);
        }
    }
}

/// The journey-based reading of fairness. `P` is fair for the execution
/// iff no message from outside `P` ever reaches `P` and every member
/// influences every other from every start round.
fn fair_by_journeys(a: &Alphabet, l: &Lasso, p_set: &BTreeSet<usize>) -> bool {
    let solo = (1..=l.stabilization_bound())
        .all(|r| a.letter(l.letter_at(r)).unwrap().is_solo(p_set));
    if !solo {
        return false;
    }
    let bound = l.stabilization_bound() + l.period.len();
    for &p in p_set {
        for &q in p_set {
            for r in 0..=bound {
                if !journey_exists(a, l, p, q, r).unwrap() {
                    return false;
                }
            }
        }
    }
    true
}

fn census(n: usize, prefix_max: usize, period_max: usize) -> [usize; 3] {
    let a = alpha(n);
    let letters = a.len();
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..prefix_max.max(period_max) {
        let mut next = Vec::new();
        for w in &frontier {
            for id in 0..letters {
                let mut v = w.clone();
                v.push(id);
                next.push(v);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut counts = [0usize; 3];
    for prefix in words.iter().filter(|w| w.len() <= prefix_max) {
        for period in words.iter().filter(|w| !w.is_empty() && w.len() <= period_max) {
            let l = Lasso::new(prefix.clone(), period.clone()).unwrap();
            let verdict = classify_geo_class(&a, &l).unwrap();
            let slot = match verdict.cardinality {
                Cardinality::One => 0,
                Cardinality::Two => 1,
                Cardinality::Infinite => 2,
            };
            counts[slot] += 1;
        }
    }
    counts
}

/// Exhaustive census of small lassos. With two processes every class is
/// a point or a pair (a fair set is the whole or a singleton, and some
/// suffix always settles on one); with three processes all three kinds
/// occur. The randomized properties above thus draw from every branch.
#[test]
fn small_lassos_cover_the_whole_trichotomy() {
    let c1 = census(1, 2, 2);
    assert!(c1[0] > 0 && c1[1] > 0, "degenerate dimension-one census: {c1:?}");
    assert_eq!(c1[2], 0, "an infinite class with two processes: {c1:?}");

    let c2 = census(2, 1, 1);
    assert!(c2.iter().all(|&c| c > 0), "missing a class kind: {c2:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn catalogue_membership_agrees_with_validation(
        masks in prop::collection::vec(0u64..8, 3),
    ) {
        let a = alpha(2);
        let views: Vec<BTreeSet<usize>> = masks
            .iter()
            .map(|m| (0..3).filter(|p| m & (1 << p) != 0).collect())
            .collect();
        match InstantGraph::new(2, views) {
            Ok(g) => prop_assert!(a.id_of(&g).is_some()),
            Err(_) => {
                let in_catalogue = a
                    .letters()
                    .iter()
                    .any(|g| g.view_masks() == masks);
                prop_assert!(!in_catalogue);
            }
        }
    }

    #[test]
    fn fairness_reduction_matches_journeys(
        prefix in prop::collection::vec(0usize..3, 0..3),
        period in prop::collection::vec(0usize..3, 1..4),
        mask in 1u64..4,
    ) {
        let a = alpha(1);
        let l = Lasso::new(prefix, period).unwrap();
        let p_set: BTreeSet<usize> = (0..2).filter(|p| mask & (1 << p) != 0).collect();
        prop_assert_eq!(
            is_fair(&a, &l, &p_set).unwrap(),
            fair_by_journeys(&a, &l, &p_set)
        );
    }

    #[test]
    fn fairness_reduction_matches_journeys_in_dimension_two(
        prefix in prop::collection::vec(0usize..13, 0..2),
        period in prop::collection::vec(0usize..13, 1..3),
        mask in 1u64..8,
    ) {
        let a = alpha(2);
        let l = Lasso::new(prefix, period).unwrap();
        let p_set: BTreeSet<usize> = (0..3).filter(|p| mask & (1 << p) != 0).collect();
        prop_assert_eq!(
            is_fair(&a, &l, &p_set).unwrap(),
            fair_by_journeys(&a, &l, &p_set)
        );
    }

    #[test]
    fn prefix_simplices_nest_and_carry_the_limit(
        prefix in prop::collection::vec(0usize..13, 0..2),
        period in prop::collection::vec(0usize..13, 1..3),
    ) {
        let a = alpha(2);
        let l = Lasso::new(prefix, period).unwrap();
        let point = geo_lasso(&a, &l).unwrap();
        let bound = l.stabilization_bound() + 1;
        let mut outer = geo_prefix(&a, &[]).unwrap();
        for r in 1..=bound {
            let word: Vec<usize> = (1..=r).map(|i| l.letter_at(i)).collect();
            let inner = geo_prefix(&a, &word).unwrap();
            for row in &inner {
                prop_assert!(simplex_contains(&outer, row).unwrap());
            }
            prop_assert!(simplex_contains(&inner, &point).unwrap());
            outer = inner;
        }
    }

    #[test]
    fn twins_are_involutive_and_geo_equivalent(
        prefix in prop::collection::vec(0usize..3, 0..3),
        period in prop::collection::vec(0usize..3, 1..3),
    ) {
        let a = alpha(1);
        let l = Lasso::new(prefix, period).unwrap();
        let verdict = classify_geo_class(&a, &l).unwrap();
        match verdict.cardinality {
            Cardinality::Two => {
                let twin = verdict.twin.clone().unwrap();
                prop_assert!(are_geo_equivalent(&a, &l, &twin).unwrap());
                prop_assert!(!twin.same_word(&l));
                let back = find_twin(&a, &twin).unwrap();
                prop_assert!(back.same_word(&l.normalized()));
            }
            _ => prop_assert!(find_twin(&a, &l).is_err()),
        }
    }

    #[test]
    fn normal_forms_preserve_the_word(
        prefix in prop::collection::vec(0usize..13, 0..4),
        period in prop::collection::vec(0usize..13, 1..4),
    ) {
        let l = Lasso::new(prefix, period).unwrap();
        let norm = l.normalized();
        prop_assert!(!norm.period.is_empty());
        prop_assert!(norm.same_word(&l));
        prop_assert_eq!(norm.normalized(), norm.clone());
        let horizon = l.stabilization_bound() + l.period.len();
        for r in 1..=horizon {
            prop_assert_eq!(norm.letter_at(r), l.letter_at(r));
        }
    }

    #[test]
    fn lasso_text_form_roundtrips(
        prefix in prop::collection::vec(0usize..100, 0..4),
        period in prop::collection::vec(0usize..100, 1..4),
    ) {
        let l = Lasso::new(prefix, period).unwrap();
        let parsed: Lasso = l.to_string().parse().unwrap();
        prop_assert_eq!(parsed, l);
    }

    #[test]
    fn word_matrices_are_stochastic_and_scrambling(
        word in prop::collection::vec(0usize..13, 1..4),
    ) {
        let a = alpha(2);
        let m = word_matrix(&a, &word).unwrap();
        for row in &m {
            prop_assert!(row.iter().all(|x| x >= &BigRational::zero()));
            let sum: BigRational = row.iter().cloned().sum();
            prop_assert_eq!(sum, BigRational::one());
        }
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let share = (0..m.len()).any(|k| {
                    m[i][k] > BigRational::zero() && m[j][k] > BigRational::zero()
                });
                prop_assert!(share, "rows {} and {} share no column", i, j);
            }
        }
    }
}
