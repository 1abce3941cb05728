//! Equivalence classes of executions under the geometrization map.
//!
//! Two infinite executions are equivalent when they converge to the same
//! point of the base simplex. A class has size one, size two, or is
//! infinite, and which of the three happens is read off the fairness
//! structure of the word's suffixes:
//!
//! * some suffix starting at round one is fair on the full process set or
//!   on a co-singleton: the word is alone in its class;
//! * otherwise some later suffix is fair on a co-singleton `Π ∖ {p}`: the
//!   class has exactly two members, differing in the single letter before
//!   that suffix (the *twin* swaps whether `p`'s block stands alone);
//! * otherwise the class is infinite.

use crate::adversary::{Alphabet, InstantGraph, Lasso, LetterId, ProcessId, Word};
use crate::error::{Error, Result};
use crate::geometry::{self, BaryPoint};
use crate::Limits;
use std::collections::BTreeSet;
use std::fmt;

/// Whether two executions converge to the same point.
pub fn are_geo_equivalent(alpha: &Alphabet, a: &Lasso, b: &Lasso) -> Result<bool> {
    Ok(geometry::geo_lasso(alpha, a)? == geometry::geo_lasso(alpha, b)?)
}

/// All words of the given length whose simplex contains `x`, in
/// lexicographic order.
///
/// The children of a simplex tile it, so the search prunes every branch
/// whose simplex misses `x`; the traversal only ever expands simplices
/// containing the point.
pub fn geo_preimage_at_depth(
    alpha: &Alphabet,
    x: &BaryPoint,
    depth: usize,
    limits: &Limits,
) -> Result<Vec<Word>> {
    geometry::check_bary_point(alpha.n(), x)?;
    limits.check_depth(depth)?;
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(depth);
    let base = crate::linalg::identity(alpha.n() + 1);
    preimage_dfs(alpha, x, depth, &base, &mut word, &mut out)?;
    Ok(out)
}

fn preimage_dfs(
    alpha: &Alphabet,
    x: &BaryPoint,
    depth: usize,
    m: &geometry::VertexMatrix,
    word: &mut Word,
    out: &mut Vec<Word>,
) -> Result<()> {
    if word.len() == depth {
        out.push(word.clone());
        return Ok(());
    }
    for id in 0..alpha.len() {
        let child = geometry::mu(&geometry::round_matrix(alpha, id)?, m);
        if geometry::simplex_contains(&child, x)? {
            word.push(id);
            preimage_dfs(alpha, x, depth, &child, word, out)?;
            word.pop();
        }
    }
    Ok(())
}

/// Size of a geo-equivalence class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    One,
    Two,
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::One => write!(f, "1"),
            Cardinality::Two => write!(f, "2"),
            Cardinality::Infinite => write!(f, "infinite"),
        }
    }
}

/// Classification of one execution's class, with the fairness witness
/// that certifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeoClassVerdict {
    pub cardinality: Cardinality,
    /// Rounds dropped before the fair suffix starts.
    pub offset: usize,
    /// The set the suffix is fair on. For infinite classes this is the
    /// smallest fair set any suffix admits.
    pub fair_set: BTreeSet<ProcessId>,
    /// The other class member, present exactly for two-element classes.
    pub twin: Option<Lasso>,
}

/// Classifies the execution's class by scanning suffixes of its normal
/// form. Offsets beyond `prefix + period` repeat, so the scan is finite.
pub fn classify_geo_class(alpha: &Alphabet, l: &Lasso) -> Result<GeoClassVerdict> {
    alpha.check_word(&l.prefix)?;
    alpha.check_word(&l.period)?;
    let l = l.normalized();
    let n = alpha.n();
    let full: BTreeSet<ProcessId> = (0..=n).collect();

    if crate::adversary::is_fair(alpha, &l, &full)? {
        return Ok(GeoClassVerdict {
            cardinality: Cardinality::One,
            offset: 0,
            fair_set: full,
            twin: None,
        });
    }
    for p in 0..=n {
        if n == 0 {
            break;
        }
        let mut q_set = full.clone();
        q_set.remove(&p);
        if crate::adversary::is_fair(alpha, &l, &q_set)? {
            return Ok(GeoClassVerdict {
                cardinality: Cardinality::One,
                offset: 0,
                fair_set: q_set,
                twin: None,
            });
        }
    }

    for offset in 1..=l.stabilization_bound() {
        let suffix = l.suffix(offset);
        for p in 0..=n {
            let mut q_set = full.clone();
            q_set.remove(&p);
            if q_set.is_empty() {
                continue;
            }
            if crate::adversary::is_fair(alpha, &suffix, &q_set)? {
                let twin = twin_from_witness(alpha, &l, offset, &q_set)?;
                return Ok(GeoClassVerdict {
                    cardinality: Cardinality::Two,
                    offset,
                    fair_set: q_set,
                    twin: Some(twin),
                });
            }
        }
    }

    // Infinite class: report the smallest set any suffix is fair on (the
    // minimal solo-trap of the period always provides one).
    for size in 1..=n + 1 {
        for set_bits in subsets_of_size(n + 1, size) {
            for offset in 0..=l.stabilization_bound() {
                if crate::adversary::is_fair(alpha, &l.suffix(offset), &set_bits)? {
                    return Ok(GeoClassVerdict {
                        cardinality: Cardinality::Infinite,
                        offset,
                        fair_set: set_bits,
                        twin: None,
                    });
                }
            }
        }
    }
    Err(Error::ClassMismatch(
        "no suffix of the execution is fair on any set, which the period's \
         minimal solo-trap should rule out"
            .into(),
    ))
}

fn subsets_of_size(universe: usize, size: usize) -> Vec<BTreeSet<ProcessId>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << universe) {
        if mask.count_ones() as usize == size {
            out.push((0..universe).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// The letter agreeing with `a` on every view of `q_set` other than `a`
/// itself. When `a` is not solo on `q_set` exactly one exists: the heard
/// member `p` either stands alone right before the first block hearing
/// it or joins that block.
fn partner_letter(alpha: &Alphabet, a: &InstantGraph, q_set: &BTreeSet<ProcessId>) -> Result<LetterId> {
    let matches: Vec<LetterId> = (0..alpha.len())
        .filter(|&id| {
            let g = alpha.letter(id).expect("id in range");
            q_set.iter().all(|&q| g.view(q) == a.view(q))
        })
        .collect();
    let a_id = alpha.id_of(a).expect("letter from this alphabet");
    let others: Vec<LetterId> = matches.into_iter().filter(|&id| id != a_id).collect();
    match others.as_slice() {
        [b] => Ok(*b),
        _ => Err(Error::ClassMismatch(format!(
            "letter {a_id} should have exactly one partner on {q_set:?}, found {others:?}"
        ))),
    }
}

fn twin_from_witness(
    alpha: &Alphabet,
    l: &Lasso,
    offset: usize,
    q_set: &BTreeSet<ProcessId>,
) -> Result<Lasso> {
    let a_id = l.letter_at(offset);
    let a = alpha.letter(a_id)?;
    let b_id = partner_letter(alpha, a, q_set)?;
    let mut prefix = l.prefix_word(offset - 1);
    prefix.push(b_id);
    let tail = l.suffix(offset);
    prefix.extend_from_slice(&tail.prefix);
    let twin = Lasso::new(prefix, tail.period)?.normalized();
    if !are_geo_equivalent(alpha, l, &twin)? {
        return Err(Error::ClassMismatch(
            "constructed twin does not share the execution's limit point".into(),
        ));
    }
    Ok(twin)
}

/// The unique other member of a two-element class.
///
/// Errors with [`Error::ClassMismatch`] when the class is a singleton or
/// infinite.
pub fn find_twin(alpha: &Alphabet, l: &Lasso) -> Result<Lasso> {
    let verdict = classify_geo_class(alpha, l)?;
    match verdict.cardinality {
        Cardinality::Two => Ok(verdict.twin.expect("two-element verdicts carry their twin")),
        other => Err(Error::ClassMismatch(format!(
            "execution's class has cardinality {other}, twins exist only for cardinality 2"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    fn alpha(n: usize) -> Alphabet {
        Alphabet::generate(n, &Limits::default()).unwrap()
    }

    fn lasso(prefix: &[usize], period: &[usize]) -> Lasso {
        Lasso::new(prefix.to_vec(), period.to_vec()).unwrap()
    }

    #[test]
    fn the_complete_run_is_alone_in_its_class() {
        let a = alpha(2);
        let v = classify_geo_class(&a, &lasso(&[], &[12])).unwrap();
        assert_eq!(v.cardinality, Cardinality::One);
        assert_eq!(v.offset, 0);
        assert_eq!(v.fair_set, (0..=2).collect());
        assert!(v.twin.is_none());
    }

    #[test]
    fn a_solo_run_on_a_co_singleton_is_alone() {
        let a = alpha(1);
        // 0^ω is fair on {0} = Π ∖ {1} from the start.
        let v = classify_geo_class(&a, &lasso(&[], &[0])).unwrap();
        assert_eq!(v.cardinality, Cardinality::One);
        assert_eq!(v.fair_set, [0].into_iter().collect());
    }

    #[test]
    fn the_two_executions_meeting_at_one_third_are_twins() {
        let a = alpha(1);
        // 2 · 0^ω: round one exchanges, then 0 runs alone.
        let w = lasso(&[2], &[0]);
        let v = classify_geo_class(&a, &w).unwrap();
        assert_eq!(v.cardinality, Cardinality::Two);
        assert_eq!(v.offset, 1);
        assert_eq!(v.fair_set, [0].into_iter().collect());
        let twin = v.twin.unwrap();
        assert_eq!(twin, lasso(&[1], &[0]));
        assert!(are_geo_equivalent(&a, &w, &twin).unwrap());
        // The twin of the twin is the original.
        assert_eq!(find_twin(&a, &twin).unwrap(), w.normalized());
    }

    #[test]
    fn a_two_element_class_in_dimension_two() {
        let a = alpha(2);
        // Letter 4 keeps {0,1} exchanging with 2 listening, so after a
        // first full-exchange round the suffix is fair on {0,1}.
        let w = lasso(&[12], &[4]);
        let verdict = classify_geo_class(&a, &w).unwrap();
        assert_eq!(verdict.cardinality, Cardinality::Two);
        assert_eq!(verdict.offset, 1);
        assert_eq!(verdict.fair_set, [0, 1].into_iter().collect());
        // The twin swaps the complete first letter for the one where 2
        // runs solo while 0 and 1 still hear everyone.
        let twin = verdict.twin.unwrap();
        assert_eq!(twin, lasso(&[11], &[4]));
        let meet = geometry::geo_lasso(&a, &w).unwrap();
        assert_eq!(meet, vec![ratio(3, 10), ratio(3, 10), ratio(2, 5)]);
        assert_eq!(geometry::geo_lasso(&a, &twin).unwrap(), meet);
        assert_eq!(find_twin(&a, &twin).unwrap(), w.normalized());
    }

    #[test]
    fn a_trapped_run_has_an_infinite_class() {
        let a = alpha(2);
        // Letter 0: process 0 solo, 1 hears {0,1}, 2 hears everyone. The
        // suffixes are fair only on {0}, which is not a co-singleton.
        let v = classify_geo_class(&a, &lasso(&[], &[0])).unwrap();
        assert_eq!(v.cardinality, Cardinality::Infinite);
        assert_eq!(v.fair_set, [0].into_iter().collect());
        assert!(v.twin.is_none());
    }

    #[test]
    fn preimages_grow_with_class_cardinality() {
        let a = alpha(2);
        let limits = Limits::default();
        // Singleton class: exactly one word per depth.
        let uniform = vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)];
        for depth in 1..=3 {
            assert_eq!(
                geo_preimage_at_depth(&a, &uniform, depth, &limits).unwrap(),
                vec![vec![12; depth]]
            );
        }
        // Infinite class at the corner: all words over the three letters
        // keeping 0 solo.
        let corner = vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)];
        for depth in 1..=3 {
            let words = geo_preimage_at_depth(&a, &corner, depth, &limits).unwrap();
            assert_eq!(words.len(), 3usize.pow(depth as u32));
            assert!(words
                .iter()
                .all(|w| w.iter().all(|&id| id <= 2)));
        }
    }

    #[test]
    fn preimage_of_a_twin_pair_point_has_exactly_two_words() {
        let a = alpha(1);
        let x = vec![ratio(1, 3), ratio(2, 3)];
        let words = geo_preimage_at_depth(&a, &x, 2, &Limits::default()).unwrap();
        assert_eq!(words, vec![vec![1, 0], vec![2, 0]]);
    }

    #[test]
    fn twin_requests_on_other_cardinalities_are_refused() {
        let a = alpha(2);
        assert!(matches!(
            find_twin(&a, &lasso(&[], &[12])),
            Err(Error::ClassMismatch(_))
        ));
        assert!(matches!(
            find_twin(&a, &lasso(&[], &[0])),
            Err(Error::ClassMismatch(_))
        ));
    }
}
