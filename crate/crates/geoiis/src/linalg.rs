//! Small dense linear algebra over arbitrary-precision rationals.
//!
//! Everything here is exact: Gaussian elimination with exact pivoting,
//! determinants, ranks, stationary vectors of row-stochastic matrices, and
//! a brute-force linear program used to certify simplex intersections.
//! Matrices never exceed a handful of rows (dimension is capped at 5), so
//! asymptotics are irrelevant; clarity and exactness are the contract.

use crate::error::{Error, Result};
use num::{BigRational, One, Signed, Zero};

/// Dense row-major rational matrix.
pub type Mat = Vec<Vec<BigRational>>;

/// `p/q` as a rational, convenience for literals.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// The `k × k` identity.
pub fn identity(k: usize) -> Mat {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Matrix product `a · b`.
///
/// Panics on inner-dimension mismatch; callers multiply matrices they
/// constructed themselves.
pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    assert!(!a.is_empty() && !b.is_empty());
    assert_eq!(a[0].len(), b.len(), "inner dimensions must agree");
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![BigRational::zero(); cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Row vector times matrix.
pub fn row_mul(v: &[BigRational], m: &Mat) -> Vec<BigRational> {
    assert_eq!(v.len(), m.len());
    let cols = m[0].len();
    let mut out = vec![BigRational::zero(); cols];
    for (vi, row) in v.iter().zip(m.iter()) {
        if vi.is_zero() {
            continue;
        }
        for j in 0..cols {
            if !row[j].is_zero() {
                out[j] += vi * &row[j];
            }
        }
    }
    out
}

/// Determinant by fraction-preserving Gaussian elimination.
pub fn determinant(m: &Mat) -> BigRational {
    let k = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone();
        for r in col + 1..k {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..k {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Reduced row echelon form of an augmented system `[a | b]`.
///
/// Returns `(reduced rows, pivot columns)`; zero rows are dropped. A row
/// of the form `0 = nonzero` is kept (its pivot column is `a[0].len()`,
/// i.e. the augmented column), signalling inconsistency to callers.
fn rref(a: &Mat, b: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let bcols = b.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend(b[i].iter().cloned());
            row
        })
        .collect();
    let total = cols + bcols;
    let mut pivots = Vec::new();
    let mut lead = 0usize;
    for col in 0..cols {
        let Some(p) = (lead..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(p, lead);
        let inv = m[lead][col].clone();
        for c in col..total {
            m[lead][c] = &m[lead][c] / &inv;
        }
        for r in 0..rows {
            if r != lead && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..total {
                    let sub = &factor * &m[lead][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        lead += 1;
        if lead == rows {
            break;
        }
    }
    // Keep inconsistent rows (0 = nonzero), drop genuinely zero rows.
    let mut out = Vec::new();
    let mut out_pivots = Vec::new();
    for (r, row) in m.into_iter().enumerate() {
        if r < lead {
            out_pivots.push(pivots[r]);
            out.push(row);
        } else if row[cols..].iter().any(|x| !x.is_zero()) {
            out_pivots.push(cols);
            out.push(row);
        }
    }
    (out, out_pivots)
}

/// Rank of a matrix.
pub fn rank(a: &Mat) -> usize {
    if a.is_empty() {
        return 0;
    }
    let b = vec![Vec::new(); a.len()];
    let (rows, pivots) = rref(a, &b);
    let cols = a[0].len();
    rows.iter()
        .zip(pivots.iter())
        .filter(|(_, &p)| p < cols)
        .count()
}

/// Unique solution of the (possibly overdetermined but consistent) system
/// `a · x = b`.
///
/// Errors when the system is inconsistent or underdetermined; the message
/// names which.
pub fn solve_unique(a: &Mat, b: &[BigRational]) -> Result<Vec<BigRational>> {
    let cols = a.first().map_or(0, |r| r.len());
    let bcol: Vec<Vec<BigRational>> = b.iter().map(|x| vec![x.clone()]).collect();
    let (rows, pivots) = rref(a, &bcol);
    let mut x = vec![BigRational::zero(); cols];
    let mut seen = vec![false; cols];
    for (row, &p) in rows.iter().zip(pivots.iter()) {
        if p >= cols {
            return Err(Error::SingularSystem("inconsistent system".into()));
        }
        x[p] = row[cols].clone();
        seen[p] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::SingularSystem(
            "underdetermined system (free variable)".into(),
        ));
    }
    Ok(x)
}

/// Left stationary row of a row-stochastic matrix: the unique `π` with
/// `π · w = π` and `Σ π = 1`.
///
/// Uniqueness must come from the matrix (products of instant-graph round
/// matrices over a full period are scrambling); an error is returned when
/// the eigen-space is not one-dimensional.
pub fn stationary_row(w: &Mat) -> Result<Vec<BigRational>> {
    let k = w.len();
    // (wᵀ - I) πᵀ = 0 stacked with the normalization Σ π = 1.
    let mut a: Mat = Vec::with_capacity(k + 1);
    for j in 0..k {
        let mut row = Vec::with_capacity(k);
        for i in 0..k {
            let mut v = w[i][j].clone();
            if i == j {
                v -= BigRational::one();
            }
            row.push(v);
        }
        a.push(row);
    }
    a.push(vec![BigRational::one(); k]);
    let mut b = vec![BigRational::zero(); k];
    b.push(BigRational::one());
    solve_unique(&a, &b).map_err(|_| {
        Error::SingularSystem("stationary vector is not unique (matrix not scrambling?)".into())
    })
}

/// `½ · Σ |uᵢ - vᵢ|`, the total-variation distance between two rows.
pub fn half_l1_distance(u: &[BigRational], v: &[BigRational]) -> BigRational {
    let two = ratio(2, 1);
    u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(BigRational::zero(), |acc, x| acc + x)
        / two
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    rec(0, k, n, &mut cur, &mut out);
    out
}

/// Exact maximum of `c · z` over the polytope `{ z : a·z = b, z ≥ 0 }`.
///
/// Returns `None` when the polytope is empty. Works by enumerating basic
/// solutions, which is sound because the feasible set here is always a
/// bounded polytope (variables are convex-combination weights), so the
/// optimum is attained at a vertex and every vertex is basic. Sizes are
/// tiny (≤ 8 variables), so enumeration beats a simplex implementation on
/// both risk and effort.
pub fn lp_max(a: &Mat, b: &[BigRational], c: &[BigRational]) -> Option<BigRational> {
    let nvars = a.first().map_or(0, |r| r.len());
    let bcol: Vec<Vec<BigRational>> = b.iter().map(|x| vec![x.clone()]).collect();
    let (rows, pivots) = rref(a, &bcol);
    if pivots.iter().any(|&p| p >= nvars) {
        return None; // inconsistent equalities
    }
    let m = rows.len(); // full row rank now
    let ared: Mat = rows.iter().map(|r| r[..nvars].to_vec()).collect();
    let bred: Vec<BigRational> = rows.iter().map(|r| r[nvars].clone()).collect();
    let mut best: Option<BigRational> = None;
    for basis in combinations(m.min(nvars), nvars) {
        let sub: Mat = ared
            .iter()
            .map(|row| basis.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if determinant(&sub).is_zero() {
            continue;
        }
        let Ok(zb) = solve_unique(&sub, &bred) else {
            continue;
        };
        if zb.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut val = BigRational::zero();
        for (slot, &j) in basis.iter().enumerate() {
            val += &c[j] * &zb[slot];
        }
        best = Some(match best {
            None => val,
            Some(old) if val > old => val,
            Some(old) => old,
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        ratio(p, q)
    }

    #[test]
    fn determinant_of_known_matrices() {
        let m = vec![vec![r(1, 3), r(2, 3)], vec![r(2, 3), r(1, 3)]];
        assert_eq!(determinant(&m), r(-1, 3));
        assert_eq!(determinant(&identity(4)), r(1, 1));
        let singular = vec![vec![r(1, 1), r(2, 1)], vec![r(2, 1), r(4, 1)]];
        assert_eq!(determinant(&singular), r(0, 1));
    }

    #[test]
    fn solve_unique_rejects_underdetermined_and_inconsistent() {
        let a = vec![vec![r(1, 1), r(1, 1)]];
        assert!(solve_unique(&a, &[r(1, 1)]).is_err());
        let a2 = vec![vec![r(1, 1)], vec![r(1, 1)]];
        assert!(solve_unique(&a2, &[r(1, 1), r(2, 1)]).is_err());
        let a3 = vec![vec![r(2, 1), r(0, 1)], vec![r(0, 1), r(4, 1)]];
        let x = solve_unique(&a3, &[r(1, 1), r(1, 1)]).unwrap();
        assert_eq!(x, vec![r(1, 2), r(1, 4)]);
    }

    #[test]
    fn stationary_row_of_two_state_chain() {
        // Rows (1,0) and (2/3,1/3): absorbing in state 0.
        let w = vec![vec![r(1, 1), r(0, 1)], vec![r(2, 3), r(1, 3)]];
        assert_eq!(stationary_row(&w).unwrap(), vec![r(1, 1), r(0, 1)]);
        // Symmetric exchange: uniform.
        let w2 = vec![vec![r(1, 3), r(2, 3)], vec![r(2, 3), r(1, 3)]];
        assert_eq!(stationary_row(&w2).unwrap(), vec![r(1, 2), r(1, 2)]);
        // Identity: eigenspace is 2-dimensional, must error.
        assert!(stationary_row(&identity(2)).is_err());
    }

    #[test]
    fn lp_max_on_a_segment() {
        // z0 + z1 = 1, z ≥ 0: max z0 = 1, max (z0 - z1) = 1.
        let a = vec![vec![r(1, 1), r(1, 1)]];
        let b = [r(1, 1)];
        assert_eq!(lp_max(&a, &b, &[r(1, 1), r(0, 1)]), Some(r(1, 1)));
        assert_eq!(lp_max(&a, &b, &[r(1, 1), r(-1, 1)]), Some(r(1, 1)));
        // Infeasible: z0 + z1 = -1 with z ≥ 0.
        assert_eq!(lp_max(&a, &[r(-1, 1)], &[r(1, 1), r(0, 1)]), None);
    }

    #[test]
    fn rank_counts_independent_rows() {
        let a = vec![
            vec![r(1, 1), r(0, 1), r(1, 1)],
            vec![r(0, 1), r(1, 1), r(1, 1)],
            vec![r(1, 1), r(1, 1), r(2, 1)],
        ];
        assert_eq!(rank(&a), 2);
    }
}
