//! Panchromatic labellings of subdivisions.
//!
//! A labelling assigns a process to every vertex of a subdivision level.
//! The central construction takes a distinguished letter τ and labels the
//! one-round subdivision so that τ's child is the *unique* panchromatic
//! simplex; iterating it along a word keeps exactly one panchromatic
//! simplex per level, the one the word's prefix reaches. The labels feed
//! the agreement algorithm: a process's decision is the label of the
//! vertex it occupies when it exits.
//!
//! Labels always sit among the colors a vertex sees, which in particular
//! makes every labelling here a Sperner labelling of the base simplex.

use crate::adversary::{Alphabet, LetterId, ProcessId};
use crate::error::{Error, Result};
use crate::geometry::{self, complex::Complex};
use std::collections::BTreeSet;

/// A process per vertex of one subdivision level, indexed by vertex id.
pub type Labelling = Vec<ProcessId>;

/// The labelling clause at one subdivision vertex.
///
/// The simplex being subdivided carries a relabelling `chi` of the
/// colors (always a permutation); `tau` structures its distinguished
/// child; the vertex has color `c` and sees the colors in `view`.
///
/// In label space (everything pushed through `chi`), the vertex is
/// labelled with the smallest label it sees that the distinguished
/// vertex of its own label misses; if there is none, the label walks the
/// cycle of its equal-view class in τ until it hits a label the vertex
/// both sees and shares a view with.
pub fn label_local(
    alpha: &Alphabet,
    chi: &[ProcessId],
    tau: LetterId,
    c: ProcessId,
    view: &BTreeSet<ProcessId>,
) -> Result<ProcessId> {
    let n = alpha.n();
    let g = alpha.letter(tau)?;
    if chi.len() != n + 1 {
        return Err(Error::WrongArity {
            expected: n + 1,
            got: chi.len(),
        });
    }
    if c > n {
        return Err(Error::ProcessOutOfRange { id: c, n });
    }
    // τ's views, pushed into label space: the vertex labelled chi[p]
    // sees the labels chi[view_of(p)].
    let mut tau_view: Vec<BTreeSet<ProcessId>> = vec![BTreeSet::new(); n + 1];
    for p in 0..=n {
        tau_view[chi[p]] = g.view(p).iter().map(|&q| chi[q]).collect();
    }
    let gamma = chi[c];
    let seen: BTreeSet<ProcessId> = view.iter().map(|&p| chi[p]).collect();

    if let Some(&q) = seen.difference(&tau_view[gamma]).next() {
        return Ok(q);
    }

    // φ cycles each class of labels with equal τ-views, ascending order.
    let mut phi: Vec<ProcessId> = (0..=n).collect();
    let mut grouped: Vec<bool> = vec![false; n + 1];
    for start in 0..=n {
        if grouped[start] {
            continue;
        }
        let class: Vec<ProcessId> = (start..=n)
            .filter(|&q| tau_view[q] == tau_view[start])
            .collect();
        for (k, &q) in class.iter().enumerate() {
            phi[q] = class[(k + 1) % class.len()];
            grouped[q] = true;
        }
    }
    let target: BTreeSet<ProcessId> = seen.intersection(&tau_view[gamma]).copied().collect();
    let mut cur = phi[gamma];
    loop {
        if target.contains(&cur) {
            return Ok(cur);
        }
        if cur == gamma {
            return Err(Error::LabellingCheck(
                "label cycle returned without meeting the vertex's view".into(),
            ));
        }
        cur = phi[cur];
    }
}

/// Labels level one of the complex so that τ's child of the base simplex
/// is the unique panchromatic simplex.
pub fn lambda_tau(alpha: &Alphabet, c: &Complex, tau: LetterId) -> Result<Labelling> {
    if c.n() != alpha.n() || c.rounds() < 1 {
        return Err(Error::PreconditionFailed(
            "labelling needs a complex over the same processes with at least one round".into(),
        ));
    }
    let identity: Vec<ProcessId> = (0..=alpha.n()).collect();
    let lv = c.level(1);
    lv.vertices
        .iter()
        .map(|v| {
            // Level-0 vertex indices are colors, so views are color sets.
            let view: BTreeSet<ProcessId> = v.view.iter().copied().collect();
            label_local(alpha, &identity, tau, v.color, &view)
        })
        .collect()
}

/// Labels every level of the complex along a word: level `r` carries the
/// `r`-round labelling whose unique panchromatic simplex is the one the
/// word's first `r` letters reach.
///
/// A vertex inside the tracked simplex is labelled by the clause, with
/// the tracked simplex's own labels as the relabelling; a vertex outside
/// inherits the label of its same-colored view element one level down.
pub fn psi_labellings(alpha: &Alphabet, c: &Complex, word: &[LetterId]) -> Result<Vec<Labelling>> {
    if c.n() != alpha.n() {
        return Err(Error::DimensionMismatch {
            expected: alpha.n(),
            got: c.n(),
        });
    }
    if word.len() < c.rounds() {
        return Err(Error::PreconditionFailed(format!(
            "word of length {} cannot label {} rounds",
            word.len(),
            c.rounds()
        )));
    }
    alpha.check_word(word)?;
    let n = alpha.n();
    let mut out: Vec<Labelling> = Vec::with_capacity(c.rounds());
    for r in 1..=c.rounds() {
        let lv = c.level(r);
        let labels = if r == 1 {
            lambda_tau(alpha, c, word[0])?
        } else {
            let prev_labels = out.last().expect("previous level labelled");
            let tracked = c
                .simplex_by_word(&word[..r - 1])
                .expect("prefixes of the labelling word stay within the complex");
            let tracked_verts = &c.level(r - 1).simplices[tracked].verts;
            let tracked_set: BTreeSet<usize> = tracked_verts.iter().copied().collect();
            let chi: Vec<ProcessId> = tracked_verts.iter().map(|&v| prev_labels[v]).collect();
            debug_assert!(is_permutation(n, &chi), "tracked labels must permute the colors");
            lv.vertices
                .iter()
                .map(|v| {
                    if v.view.iter().all(|u| tracked_set.contains(u)) {
                        let view: BTreeSet<ProcessId> = v
                            .view
                            .iter()
                            .map(|&u| c.level(r - 1).vertices[u].color)
                            .collect();
                        label_local(alpha, &chi, word[r - 1], v.color, &view)
                    } else {
                        Ok(prev_labels[v.precursor])
                    }
                })
                .collect::<Result<Labelling>>()?
        };
        out.push(labels);
    }
    Ok(out)
}

fn is_permutation(n: usize, chi: &[ProcessId]) -> bool {
    let seen: BTreeSet<ProcessId> = chi.iter().copied().collect();
    chi.len() == n + 1 && seen.len() == n + 1 && seen.iter().all(|&p| p <= n)
}

/// Evaluates the word's labelling at the color-`i` vertex of the simplex
/// reached by an execution prefix, without materializing the complex.
///
/// Descends through view elements: at each level the vertex either sits
/// inside the simplex the rule's prefix reaches, where the clause
/// applies, or it inherits from its same-colored view element one level
/// down. Level one is always inside, so the descent terminates.
pub fn eval_psi_at(
    alpha: &Alphabet,
    rule: &[LetterId],
    exec: &[LetterId],
    i: ProcessId,
    r: usize,
) -> Result<ProcessId> {
    let n = alpha.n();
    if i > n {
        return Err(Error::ProcessOutOfRange { id: i, n });
    }
    if r == 0 || r > exec.len() || r > rule.len() {
        return Err(Error::PreconditionFailed(format!(
            "round {r} needs both words to have at least {r} letters"
        )));
    }
    alpha.check_word(rule)?;
    alpha.check_word(exec)?;

    // chi[s] labels the simplex rule[..s] reaches; matrices are the
    // vertex coordinates of both paths.
    let mut chi: Vec<Vec<ProcessId>> = vec![(0..=n).collect()];
    for s in 1..r {
        let prev = chi.last().expect("seeded with the identity");
        let g = alpha.letter(rule[s - 1])?;
        let next = (0..=n)
            .map(|c| {
                let view: BTreeSet<ProcessId> = g.view(c).iter().copied().collect();
                label_local(alpha, prev, rule[s - 1], c, &view)
            })
            .collect::<Result<Vec<_>>>()?;
        chi.push(next);
    }
    let mut m_rule = vec![crate::linalg::identity(n + 1)];
    let mut m_exec = vec![crate::linalg::identity(n + 1)];
    for s in 1..=r {
        m_rule.push(geometry::mu(
            &geometry::round_matrix(alpha, rule[s - 1])?,
            &m_rule[s - 1],
        ));
        m_exec.push(geometry::mu(
            &geometry::round_matrix(alpha, exec[s - 1])?,
            &m_exec[s - 1],
        ));
    }

    let mut s = r;
    loop {
        let g = alpha.letter(exec[s - 1])?;
        let view = g.view(i);
        let inside = view.iter().all(|&p| m_exec[s - 1][p] == m_rule[s - 1][p]);
        if inside {
            let view_set: BTreeSet<ProcessId> = view.iter().copied().collect();
            return label_local(alpha, &chi[s - 1], rule[s - 1], i, &view_set);
        }
        debug_assert!(s > 1, "level one vertices always sit inside the base");
        s -= 1;
    }
}

/// Indices of the level's simplices whose labels hit every process.
pub fn panchromatic_simplices(c: &Complex, level: usize, labels: &Labelling) -> Vec<usize> {
    let lv = c.level(level);
    let n = c.n();
    lv.simplices
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let seen: BTreeSet<ProcessId> = s.verts.iter().map(|&v| labels[v]).collect();
            seen.len() == n + 1
        })
        .map(|(i, _)| i)
        .collect()
}

/// The classic boundary condition: every label names a color positive at
/// its vertex. All clause-produced labellings satisfy it; arbitrary
/// labellings satisfying it still admit a panchromatic simplex.
pub fn is_sperner(c: &Complex, level: usize, labels: &Labelling) -> bool {
    use num::Zero;
    let lv = c.level(level);
    labels.len() == lv.vertices.len()
        && lv
            .vertices
            .iter()
            .zip(labels)
            .all(|(v, &l)| l < v.coords.len() && !v.coords[l].is_zero())
}

/// Outcome of checking one τ-labelling of level one.
#[derive(Debug, Clone)]
pub struct PanReport {
    pub sperner_ok: bool,
    /// Indices of panchromatic simplices found.
    pub panchromatic: Vec<usize>,
    /// Index of τ's child, the one simplex required to be panchromatic.
    pub expected: usize,
    pub unique_expected: bool,
}

/// Checks a level-one labelling against its defining property.
pub fn verify_panlabelling(
    alpha: &Alphabet,
    c: &Complex,
    tau: LetterId,
    labels: &Labelling,
) -> Result<PanReport> {
    alpha.letter(tau)?;
    if c.rounds() < 1 || labels.len() != c.level(1).vertices.len() {
        return Err(Error::LabellingCheck(
            "labelling does not cover level one of the complex".into(),
        ));
    }
    let expected = c
        .level(1)
        .simplices
        .iter()
        .position(|s| s.letter == tau)
        .expect("every letter produces a child of the base");
    let panchromatic = panchromatic_simplices(c, 1, labels);
    Ok(PanReport {
        sperner_ok: is_sperner(c, 1, labels),
        unique_expected: panchromatic == vec![expected],
        panchromatic,
        expected,
    })
}
