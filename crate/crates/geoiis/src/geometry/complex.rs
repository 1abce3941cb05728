//! Iterated chromatic subdivision as an explicit complex.
//!
//! A [`Complex`] stores one [`Level`] per round. Level zero is the base
//! simplex; each later level subdivides every simplex of the previous one
//! by every letter of the alphabet. Vertices are deduplicated across
//! parent simplices by their presentation `(color, view)`, where the view
//! is the face of the previous level the vertex averages over; equal
//! presentations have equal coordinates and vice versa, so gluing along
//! shared faces is automatic.

use super::{barycentric_wrt, BaryPoint, VertexMatrix};
use crate::adversary::{Alphabet, LetterId, ProcessId, Word};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::Limits;
use num::{BigRational, Signed, Zero};
use std::collections::BTreeMap;

/// A vertex of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    /// Exact coordinates in the base simplex.
    pub coords: BaryPoint,
    pub color: ProcessId,
    /// Vertex indices of the previous level this vertex averages over,
    /// sorted ascending. Empty at level zero.
    pub view: Vec<usize>,
    /// The element of `view` sharing this vertex's color; at level zero,
    /// the vertex itself.
    pub precursor: usize,
}

/// A maximal simplex of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexData {
    /// Vertex indices by color: `verts[c]` has color `c`.
    pub verts: Vec<usize>,
    /// Index of the subdivided simplex in the previous level.
    pub parent: usize,
    /// The letter that produced this child; unused at level zero.
    pub letter: LetterId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub vertices: Vec<VertexData>,
    pub simplices: Vec<SimplexData>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    n: usize,
    levels: Vec<Level>,
}

impl Complex {
    /// The undivided base simplex on colors `0..=n`.
    pub fn base(n: usize) -> Self {
        let vertices = (0..=n)
            .map(|i| {
                let mut coords = vec![BigRational::zero(); n + 1];
                coords[i] = linalg::ratio(1, 1);
                VertexData {
                    coords,
                    color: i,
                    view: Vec::new(),
                    precursor: i,
                }
            })
            .collect();
        let simplices = vec![SimplexData {
            verts: (0..=n).collect(),
            parent: 0,
            letter: 0,
        }];
        Complex {
            n,
            levels: vec![Level { vertices, simplices }],
        }
    }

    /// Reassembles a complex from raw levels, checking structural sanity
    /// (index ranges, arities, colors); geometric correctness is the job
    /// of [`Complex::verify_subdivision`].
    pub fn from_levels(n: usize, levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::ComplexParse("no levels".into()));
        }
        for (r, lv) in levels.iter().enumerate() {
            for (vi, v) in lv.vertices.iter().enumerate() {
                if v.coords.len() != n + 1 {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: vertex {vi} has {} coordinates",
                        v.coords.len()
                    )));
                }
                if v.color > n {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: vertex {vi} has color {}",
                        v.color
                    )));
                }
                let prev_len = if r == 0 {
                    lv.vertices.len()
                } else {
                    levels[r - 1].vertices.len()
                };
                if v.view.iter().any(|&u| u >= prev_len) || v.precursor >= prev_len {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: vertex {vi} references a missing vertex"
                    )));
                }
            }
            for (si, s) in lv.simplices.iter().enumerate() {
                if s.verts.len() != n + 1 {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: simplex {si} has {} vertices",
                        s.verts.len()
                    )));
                }
                if s.verts.iter().any(|&v| v >= lv.vertices.len()) {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: simplex {si} references a missing vertex"
                    )));
                }
                if s.verts.iter().enumerate().any(|(c, &v)| lv.vertices[v].color != c) {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: simplex {si} is not indexed by color"
                    )));
                }
                let parents = if r == 0 { 1 } else { levels[r - 1].simplices.len() };
                if s.parent >= parents {
                    return Err(Error::ComplexParse(format!(
                        "level {r}: simplex {si} references a missing parent"
                    )));
                }
            }
        }
        Ok(Complex { n, levels })
    }

    /// Builds the `rounds`-fold subdivision of the base simplex.
    pub fn iterated(alpha: &Alphabet, rounds: usize, limits: &Limits) -> Result<Self> {
        limits.check_depth(rounds)?;
        let mut c = Complex::base(alpha.n());
        for _ in 0..rounds {
            c.subdivide(alpha)?;
        }
        Ok(c)
    }

    /// Appends one more subdivision level.
    pub fn subdivide(&mut self, alpha: &Alphabet) -> Result<()> {
        if alpha.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: alpha.n(),
            });
        }
        let prev = self.levels.last().expect("at least the base level");
        let mut vertices: Vec<VertexData> = Vec::new();
        let mut by_presentation: BTreeMap<(ProcessId, Vec<usize>), usize> = BTreeMap::new();
        let mut simplices = Vec::with_capacity(prev.simplices.len() * alpha.len());
        for (sidx, s) in prev.simplices.iter().enumerate() {
            for id in 0..alpha.len() {
                let g = alpha.letter(id)?;
                let mut verts = Vec::with_capacity(self.n + 1);
                for q in 0..=self.n {
                    let mut view: Vec<usize> =
                        g.view(q).iter().map(|&p| s.verts[p]).collect();
                    view.sort_unstable();
                    let key = (q, view.clone());
                    let next_idx = vertices.len();
                    let vidx = *by_presentation.entry(key).or_insert_with(|| {
                        let k = view.len() as i64;
                        let own = s.verts[q];
                        let mut coords = vec![BigRational::zero(); self.n + 1];
                        for &pv in &view {
                            let w = if pv == own {
                                linalg::ratio(1, 2 * k - 1)
                            } else {
                                linalg::ratio(2, 2 * k - 1)
                            };
                            for (j, c) in prev.vertices[pv].coords.iter().enumerate() {
                                coords[j] += c * &w;
                            }
                        }
                        vertices.push(VertexData {
                            coords,
                            color: q,
                            view,
                            precursor: own,
                        });
                        next_idx
                    });
                    verts.push(vidx);
                }
                simplices.push(SimplexData {
                    verts,
                    parent: sidx,
                    letter: id,
                });
            }
        }
        self.levels.push(Level { vertices, simplices });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of subdivision rounds applied (levels minus one).
    pub fn rounds(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, r: usize) -> &Level {
        &self.levels[r]
    }

    pub fn top(&self) -> &Level {
        self.levels.last().expect("at least the base level")
    }

    /// Vertex matrix of a simplex: row `c` is its color-`c` vertex.
    pub fn vertex_matrix(&self, level: usize, simplex: usize) -> VertexMatrix {
        let lv = &self.levels[level];
        lv.simplices[simplex]
            .verts
            .iter()
            .map(|&v| lv.vertices[v].coords.clone())
            .collect()
    }

    /// The letters leading from the base simplex to this simplex, in
    /// round order.
    pub fn word_of(&self, level: usize, simplex: usize) -> Word {
        let mut word = vec![0; level];
        let mut cur = simplex;
        for r in (1..=level).rev() {
            let s = &self.levels[r].simplices[cur];
            word[r - 1] = s.letter;
            cur = s.parent;
        }
        word
    }

    /// The simplex reached from the base by reading `word`, if the
    /// complex is deep enough.
    pub fn simplex_by_word(&self, word: &[LetterId]) -> Option<usize> {
        if word.len() + 1 > self.levels.len() {
            return None;
        }
        let mut cur = 0usize;
        for (r, &id) in word.iter().enumerate() {
            cur = self.levels[r + 1]
                .simplices
                .iter()
                .position(|s| s.parent == cur && s.letter == id)?;
        }
        Some(cur)
    }

    /// Exact intersection of two closed simplices of one level.
    ///
    /// Returns `None` when disjoint, the shared vertex list when the
    /// intersection is exactly the face they span, and an error when the
    /// simplices overlap improperly.
    pub fn simplex_intersection(
        &self,
        level: usize,
        i: usize,
        j: usize,
    ) -> Result<Option<Vec<usize>>> {
        let lv = &self.levels[level];
        let (vi, vj) = (&lv.simplices[i].verts, &lv.simplices[j].verts);
        let mi = self.vertex_matrix(level, i);
        let mj = self.vertex_matrix(level, j);
        let shared: Vec<usize> = vi.iter().copied().filter(|v| vj.contains(v)).collect();

        // z = (λ, ν) ≥ 0 with λ·mi = ν·mj, Σλ = 1, Σν = 1.
        let k = self.n + 1;
        let mut a: Mat = Vec::new();
        let mut b = Vec::new();
        for col in 0..k {
            let mut row = Vec::with_capacity(2 * k);
            for r in 0..k {
                row.push(mi[r][col].clone());
            }
            for r in 0..k {
                row.push(-mj[r][col].clone());
            }
            a.push(row);
            b.push(BigRational::zero());
        }
        let mut ones_l = vec![BigRational::zero(); 2 * k];
        let mut ones_r = vec![BigRational::zero(); 2 * k];
        for r in 0..k {
            ones_l[r] = linalg::ratio(1, 1);
            ones_r[k + r] = linalg::ratio(1, 1);
        }
        a.push(ones_l);
        b.push(linalg::ratio(1, 1));
        a.push(ones_r);
        b.push(linalg::ratio(1, 1));

        let mut feasible = false;
        for (side, verts) in [(0usize, vi), (1usize, vj)] {
            for (pos, v) in verts.iter().enumerate() {
                if shared.contains(v) {
                    continue;
                }
                let mut c = vec![BigRational::zero(); 2 * k];
                c[side * k + pos] = linalg::ratio(1, 1);
                match linalg::lp_max(&a, &b, &c) {
                    None => return Ok(None),
                    Some(m) if m.is_zero() => feasible = true,
                    Some(m) => {
                        return Err(Error::SubdivisionCheck(format!(
                            "level {level}: simplices {i} and {j} overlap beyond their \
                             shared face (vertex {v} carries weight {m})"
                        )))
                    }
                }
            }
        }
        if !feasible && shared.is_empty() {
            // All vertices shared is impossible here; no non-shared
            // vertex means the LP was never run, so probe feasibility.
            let c = vec![BigRational::zero(); 2 * k];
            if linalg::lp_max(&a, &b, &c).is_none() {
                return Ok(None);
            }
        }
        if shared.is_empty() {
            return Ok(None);
        }
        Ok(Some(shared))
    }

    /// Checks that every level is a genuine subdivision of the previous
    /// one, collecting all violations instead of stopping at the first.
    pub fn verify_subdivision(&self) -> SubdivisionReport {
        let mut violations = Vec::new();
        for r in 1..self.levels.len() {
            self.verify_level(r, &mut violations);
        }
        SubdivisionReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    fn verify_level(&self, r: usize, violations: &mut Vec<String>) {
        let lv = &self.levels[r];
        let parent_count = self.levels[r - 1].simplices.len();
        let mats: Vec<VertexMatrix> = (0..lv.simplices.len())
            .map(|i| self.vertex_matrix(r, i))
            .collect();
        let dets: Vec<BigRational> = mats.iter().map(linalg::determinant).collect();

        for (i, det) in dets.iter().enumerate() {
            if det.is_zero() {
                violations.push(format!("level {r}: simplex {i} is degenerate"));
            }
        }

        // Children stay inside their parent and fill its volume exactly.
        let mut volume = vec![BigRational::zero(); parent_count];
        for (i, s) in lv.simplices.iter().enumerate() {
            let pm = self.vertex_matrix(r - 1, s.parent);
            for &v in &s.verts {
                match barycentric_wrt(&pm, &lv.vertices[v].coords) {
                    Ok(lam) if lam.iter().all(|c| !c.is_negative()) => {}
                    _ => violations.push(format!(
                        "level {r}: vertex {v} of simplex {i} leaves parent {}",
                        s.parent
                    )),
                }
            }
            volume[s.parent] += dets[i].abs();
        }
        for (p, vol) in volume.iter().enumerate() {
            let parent_det = linalg::determinant(&self.vertex_matrix(r - 1, p)).abs();
            if *vol != parent_det {
                violations.push(format!(
                    "level {r}: children of parent {p} cover volume {vol} of {parent_det}"
                ));
            }
        }

        // Pairwise proper intersection, pruned by bounding boxes.
        let boxes: Vec<(BaryPoint, BaryPoint)> = mats
            .iter()
            .map(|m| {
                let lo = (0..=self.n)
                    .map(|j| m.iter().map(|row| row[j].clone()).min().expect("non-empty"))
                    .collect();
                let hi = (0..=self.n)
                    .map(|j| m.iter().map(|row| row[j].clone()).max().expect("non-empty"))
                    .collect();
                (lo, hi)
            })
            .collect();
        for i in 0..lv.simplices.len() {
            for j in i + 1..lv.simplices.len() {
                let overlap = (0..=self.n).all(|d| {
                    boxes[i].0[d] <= boxes[j].1[d] && boxes[j].0[d] <= boxes[i].1[d]
                });
                if !overlap {
                    continue;
                }
                if let Err(e) = self.simplex_intersection(r, i, j) {
                    violations.push(e.to_string());
                }
            }
        }

        // Facets: interior ones shared by exactly two simplices, boundary
        // ones by exactly one.
        let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for s in &lv.simplices {
            for drop in 0..s.verts.len() {
                let mut facet: Vec<usize> = s
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pos != drop)
                    .map(|(_, &v)| v)
                    .collect();
                facet.sort_unstable();
                *facet_count.entry(facet).or_insert(0) += 1;
            }
        }
        for (facet, count) in facet_count {
            let on_boundary = (0..=self.n)
                .any(|j| facet.iter().all(|&v| lv.vertices[v].coords[j].is_zero()));
            match (count, on_boundary) {
                (1, true) | (2, false) => {}
                _ => violations.push(format!(
                    "level {r}: facet {facet:?} lies in {count} simplices \
                     (boundary: {on_boundary})"
                )),
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubdivisionReport {
    pub passed: bool,
    pub violations: Vec<String>,
}
