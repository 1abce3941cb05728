//! Geometrization of executions in barycentric coordinates.
//!
//! Every point of the standard simplex on processes `0..=n` is a row
//! vector of non-negative rationals summing to one. A one-round letter
//! `G` acts as a row-stochastic matrix `W_G`: the color-`q` vertex of the
//! round simplex moves to the weighted average of the vertices `q`
//! receives from, with its own vertex weighted `1/(2k-1)` and the `k-1`
//! others `2/(2k-1)`. Composing rounds multiplies matrices on the left,
//! so a finite word maps the base simplex onto a nested simplex and an
//! infinite execution contracts to a single point, its *geo*.
//!
//! Everything here is exact: `BigRational` coordinates, no floating
//! point outside the render-only exporters in [`export`].

pub mod complex;
pub mod export;

use crate::adversary::{Alphabet, Lasso, LetterId};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use num::{BigRational, One, Signed, Zero};

/// A point in barycentric coordinates: one rational per process, sum 1.
pub type BaryPoint = Vec<BigRational>;

/// Vertex matrix of a colored simplex: row `q` is the color-`q` vertex.
pub type VertexMatrix = Mat;

/// The stochastic matrix of one letter. Row `q` spreads weight over the
/// view of `q`: `1/(2k-1)` on `q` itself and `2/(2k-1)` on each of the
/// other `k-1` received processes.
pub fn round_matrix(alpha: &Alphabet, id: LetterId) -> Result<Mat> {
    let g = alpha.letter(id)?;
    let n = alpha.n();
    let mut m = vec![vec![BigRational::zero(); n + 1]; n + 1];
    for q in 0..=n {
        let k = g.view(q).len() as i64;
        for &p in g.view(q) {
            m[q][p] = if p == q {
                linalg::ratio(1, 2 * k - 1)
            } else {
                linalg::ratio(2, 2 * k - 1)
            };
        }
    }
    Ok(m)
}

/// The subdivision step on vertex matrices: the child of `v` under
/// letter `g` is `W_g · v`.
pub fn mu(w_g: &Mat, v: &VertexMatrix) -> VertexMatrix {
    linalg::mat_mul(w_g, v)
}

/// The vertex matrix of the word's simplex: the letters of `word` applied
/// in round order to the base simplex, i.e. `W_{w_r} ··· W_{w_1}`.
pub fn word_matrix(alpha: &Alphabet, word: &[LetterId]) -> Result<VertexMatrix> {
    let mut m = linalg::identity(alpha.n() + 1);
    for &id in word {
        m = mu(&round_matrix(alpha, id)?, &m);
    }
    Ok(m)
}

/// The simplex a finite execution prefix is mapped onto.
pub fn geo_prefix(alpha: &Alphabet, word: &[LetterId]) -> Result<VertexMatrix> {
    word_matrix(alpha, word)
}

/// The single point all completions of a lasso converge to.
///
/// The period's product matrix `P` is scrambling (containment gives any
/// two rows a common positive column), so `P^r` converges to the rank-one
/// matrix with every row its stationary vector `π`; the geo of
/// `u · v^ω` is therefore `π · M(u)`, computed exactly.
pub fn geo_lasso(alpha: &Alphabet, l: &Lasso) -> Result<BaryPoint> {
    let period_matrix = word_matrix(alpha, &l.period)?;
    let pi = linalg::stationary_row(&period_matrix)?;
    let prefix_matrix = word_matrix(alpha, &l.prefix)?;
    Ok(linalg::row_mul(&pi, &prefix_matrix))
}

// ── Contraction ──────────────────────────────────────────────────────────

/// Smallest and largest pairwise contraction coefficients of the round
/// matrices, with the per-letter table as certificate.
///
/// For rows `i`, `j` the coefficient is `½‖row_i − row_j‖₁`; it bounds
/// the factor by which the `ℓ1` distance of the color-`i` and color-`j`
/// vertices shrinks in one round. Containment keeps every coefficient
/// below one, self-weights keep it above zero.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub k_lower: BigRational,
    pub k_upper: BigRational,
    /// `(letter, min pair coefficient, max pair coefficient)`.
    pub per_letter: Vec<(LetterId, BigRational, BigRational)>,
}

pub fn contraction_constants(alpha: &Alphabet) -> Result<ContractionReport> {
    if alpha.n() == 0 {
        return Err(Error::PreconditionFailed(
            "contraction needs at least two processes".into(),
        ));
    }
    let mut per_letter = Vec::with_capacity(alpha.len());
    for id in 0..alpha.len() {
        let w = round_matrix(alpha, id)?;
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                let d = linalg::half_l1_distance(&w[i], &w[j]);
                if lo.as_ref().is_none_or(|x| d < *x) {
                    lo = Some(d.clone());
                }
                if hi.as_ref().is_none_or(|x| d > *x) {
                    hi = Some(d);
                }
            }
        }
        per_letter.push((id, lo.expect("n >= 1"), hi.expect("n >= 1")));
    }
    let k_lower = per_letter.iter().map(|(_, lo, _)| lo.clone()).min().expect("non-empty");
    let k_upper = per_letter.iter().map(|(_, _, hi)| hi.clone()).max().expect("non-empty");
    if k_lower <= BigRational::zero() || k_upper >= BigRational::one() {
        return Err(Error::PreconditionFailed(format!(
            "contraction constants out of range: {k_lower} .. {k_upper}"
        )));
    }
    Ok(ContractionReport {
        k_lower,
        k_upper,
        per_letter,
    })
}

/// Largest `ℓ1` distance between two vertices of a simplex.
pub fn simplex_diameter_l1(v: &VertexMatrix) -> BigRational {
    let mut best = BigRational::zero();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d: BigRational = v[i]
                .iter()
                .zip(&v[j])
                .map(|(a, b)| (a - b).abs())
                .sum();
            if d > best {
                best = d;
            }
        }
    }
    best
}

// ── Exact simplex predicates ─────────────────────────────────────────────

/// Coefficients of `x` with respect to the rows of `v`: the unique `λ`
/// with `λ · v = x`. Entries may be negative; the point lies in the
/// closed simplex iff all are non-negative.
pub fn barycentric_wrt(v: &VertexMatrix, x: &[BigRational]) -> Result<Vec<BigRational>> {
    let k = v.len();
    if x.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: x.len(),
        });
    }
    // Transpose: columns of v become rows, so λ·v = x reads vᵀ·λᵀ = xᵀ.
    let vt: Mat = (0..k).map(|j| (0..k).map(|i| v[i][j].clone()).collect()).collect();
    linalg::solve_unique(&vt, x).map_err(|_| {
        Error::DegenerateSimplex("vertex matrix is singular".into())
    })
}

/// Whether `x` lies in the closed simplex spanned by the rows of `v`.
pub fn simplex_contains(v: &VertexMatrix, x: &[BigRational]) -> Result<bool> {
    Ok(barycentric_wrt(v, x)?.iter().all(|c| !c.is_negative()))
}

/// Whether `x` lies in the open interior of the simplex.
pub fn simplex_contains_strictly(v: &VertexMatrix, x: &[BigRational]) -> Result<bool> {
    Ok(barycentric_wrt(v, x)?.iter().all(|c| c.is_positive()))
}

/// Validates a barycentric point: correct arity, non-negative, sum one.
pub fn check_bary_point(n: usize, x: &[BigRational]) -> Result<()> {
    if x.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: x.len(),
        });
    }
    if x.iter().any(|c| c.is_negative()) {
        return Err(Error::InvalidBaryPoint("negative coordinate".into()));
    }
    let sum: BigRational = x.iter().sum();
    if !sum.is_one() {
        return Err(Error::InvalidBaryPoint(format!("coordinates sum to {sum}")));
    }
    Ok(())
}

/// The barycenter of a simplex.
pub fn barycenter(v: &VertexMatrix) -> BaryPoint {
    let k = v.len();
    let inv = linalg::ratio(1, k as i64);
    (0..v[0].len())
        .map(|j| v.iter().map(|row| &row[j] * &inv).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Lasso;
    use crate::Limits;

    fn alpha(n: usize) -> Alphabet {
        Alphabet::generate(n, &Limits::default()).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        linalg::ratio(p, q)
    }

    #[test]
    fn round_matrices_for_n1() {
        let a = alpha(1);
        // Letter 0: process 0 solo.
        assert_eq!(
            round_matrix(&a, 0).unwrap(),
            vec![vec![r(1, 1), r(0, 1)], vec![r(2, 3), r(1, 3)]]
        );
        // Letter 1: process 1 solo.
        assert_eq!(
            round_matrix(&a, 1).unwrap(),
            vec![vec![r(1, 3), r(2, 3)], vec![r(0, 1), r(1, 1)]]
        );
        // Letter 2: full exchange.
        assert_eq!(
            round_matrix(&a, 2).unwrap(),
            vec![vec![r(1, 3), r(2, 3)], vec![r(2, 3), r(1, 3)]]
        );
    }

    #[test]
    fn round_matrices_are_row_stochastic() {
        for n in 0..=3 {
            let a = alpha(n);
            for id in 0..a.len() {
                let w = round_matrix(&a, id).unwrap();
                for row in &w {
                    assert!(row.iter().all(|c| !c.is_negative()));
                    assert!(row.iter().sum::<BigRational>().is_one());
                }
                assert!(!linalg::determinant(&w).is_zero());
            }
        }
    }

    #[test]
    fn words_compose_in_round_order() {
        let a = alpha(1);
        let w0 = round_matrix(&a, 0).unwrap();
        let w2 = round_matrix(&a, 2).unwrap();
        // Reading 0 then 2 applies W_2 to the simplex W_0 produced.
        assert_eq!(word_matrix(&a, &[0, 2]).unwrap(), linalg::mat_mul(&w2, &w0));
    }

    #[test]
    fn geo_of_the_two_executions_meeting_at_one_third() {
        let a = alpha(1);
        // 2 · 0^ω and 1 · 0^ω land on the same point (1/3, 2/3).
        let l1 = Lasso::new(vec![2], vec![0]).unwrap();
        let l2 = Lasso::new(vec![1], vec![0]).unwrap();
        let expect = vec![r(1, 3), r(2, 3)];
        assert_eq!(geo_lasso(&a, &l1).unwrap(), expect);
        assert_eq!(geo_lasso(&a, &l2).unwrap(), expect);
    }

    #[test]
    fn geo_of_the_complete_letter_is_the_barycenter() {
        for n in 1..=3 {
            let a = alpha(n);
            let l = Lasso::new(vec![], vec![a.complete_id()]).unwrap();
            let uniform = vec![r(1, n as i64 + 1); n + 1];
            assert_eq!(geo_lasso(&a, &l).unwrap(), uniform);
        }
    }

    #[test]
    fn geo_of_a_solo_run_is_the_corner() {
        let a = alpha(2);
        // Letter 0 keeps process 0 solo forever.
        let l = Lasso::new(vec![], vec![0]).unwrap();
        assert_eq!(geo_lasso(&a, &l).unwrap(), vec![r(1, 1), r(0, 1), r(0, 1)]);
    }

    #[test]
    fn geo_lies_in_every_prefix_simplex() {
        let a = alpha(2);
        let l = Lasso::new(vec![12, 3], vec![5, 0]).unwrap();
        let x = geo_lasso(&a, &l).unwrap();
        for depth in 0..=6 {
            let v = geo_prefix(&a, &l.prefix_word(depth)).unwrap();
            assert!(simplex_contains(&v, &x).unwrap(), "depth {depth}");
        }
    }

    #[test]
    fn contraction_constants_for_n1_are_one_third() {
        let rep = contraction_constants(&alpha(1)).unwrap();
        assert_eq!(rep.k_lower, r(1, 3));
        assert_eq!(rep.k_upper, r(1, 3));
    }

    #[test]
    fn contraction_constants_sit_strictly_between_zero_and_one() {
        for n in 1..=3 {
            let rep = contraction_constants(&alpha(n)).unwrap();
            assert!(rep.k_lower.is_positive());
            assert!(rep.k_lower <= rep.k_upper);
            assert!(rep.k_upper < BigRational::one(), "n = {n}");
        }
    }

    #[test]
    fn first_round_diameter_equals_twice_the_letter_coefficient() {
        let a = alpha(2);
        for (id, _, hi) in contraction_constants(&a).unwrap().per_letter {
            let v = word_matrix(&a, &[id]).unwrap();
            assert_eq!(simplex_diameter_l1(&v), r(2, 1) * hi);
        }
    }

    #[test]
    fn barycentric_solve_inverts_the_vertex_matrix() {
        let a = alpha(2);
        let v = word_matrix(&a, &[12, 4]).unwrap();
        let x = barycenter(&v);
        let lam = barycentric_wrt(&v, &x).unwrap();
        assert_eq!(lam, vec![r(1, 3), r(1, 3), r(1, 3)]);
        assert!(simplex_contains_strictly(&v, &x).unwrap());
        // A base corner is outside any interior child simplex.
        let corner = vec![r(1, 1), r(0, 1), r(0, 1)];
        assert!(!simplex_contains(&v, &corner).unwrap());
    }

    #[test]
    fn bary_point_validation() {
        assert!(check_bary_point(1, &[r(1, 2), r(1, 2)]).is_ok());
        assert!(matches!(
            check_bary_point(1, &[r(1, 2)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            check_bary_point(1, &[r(3, 2), r(-1, 2)]),
            Err(Error::InvalidBaryPoint(_))
        ));
        assert!(matches!(
            check_bary_point(1, &[r(1, 2), r(1, 3)]),
            Err(Error::InvalidBaryPoint(_))
        ));
    }
}
