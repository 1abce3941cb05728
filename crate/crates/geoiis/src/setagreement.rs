//! The agreement algorithm, holes in adversaries, and verification.
//!
//! The algorithm is parameterized by a *rule*: an infinite execution the
//! adversary is known not to deliver, together with its whole class. A
//! process follows its own execution and exits at the first round where
//! its vertex leaves the rule's path; it decides the labelling value at
//! the vertex it exited on (see [`crate::sperner`]). As long as the
//! rule's class cannot happen, every process eventually exits, and the
//! labelling's structure keeps the decided values to at most `n`
//! distinct processes.

use crate::adversary::{AdversaryAutomaton, Alphabet, Lasso, ProcessId, Word};
use crate::classes::{self, Cardinality};
use crate::error::{Error, Result};
use crate::geometry::{self, BaryPoint};
use crate::sperner;
use crate::Limits;
use std::collections::BTreeSet;

// ── Running the algorithm ────────────────────────────────────────────────

/// When one process exited and what it decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessOutcome {
    pub decided_round: Option<usize>,
    pub value: Option<ProcessId>,
}

/// A bounded run of the algorithm on one execution.
#[derive(Debug, Clone)]
pub struct TaskRun {
    pub horizon: usize,
    /// Indexed by process.
    pub outcomes: Vec<ProcessOutcome>,
}

impl TaskRun {
    pub fn all_decided(&self) -> bool {
        self.outcomes.iter().all(|o| o.decided_round.is_some())
    }

    pub fn decided_values(&self) -> BTreeSet<ProcessId> {
        self.outcomes.iter().filter_map(|o| o.value).collect()
    }
}

/// Runs the algorithm written for `rule` on `exec` through `horizon`
/// rounds.
///
/// A process exits at the first round where its vertex differs from the
/// rule's same-colored vertex; on the rule itself it never exits. A
/// process hearing an exited process exits too, which the run asserts:
/// divergence of a vertex persists and spreads through views.
pub fn run_aw(alpha: &Alphabet, rule: &Lasso, exec: &Lasso, horizon: usize) -> Result<TaskRun> {
    alpha.check_word(&rule.prefix)?;
    alpha.check_word(&rule.period)?;
    alpha.check_word(&exec.prefix)?;
    alpha.check_word(&exec.period)?;
    let n = alpha.n();
    let mut outcomes = vec![
        ProcessOutcome {
            decided_round: None,
            value: None,
        };
        n + 1
    ];
    let mut m_rule = crate::linalg::identity(n + 1);
    let mut m_exec = crate::linalg::identity(n + 1);
    for r in 1..=horizon {
        let rule_letter = rule.letter_at(r);
        let exec_letter = exec.letter_at(r);
        m_rule = geometry::mu(&geometry::round_matrix(alpha, rule_letter)?, &m_rule);
        m_exec = geometry::mu(&geometry::round_matrix(alpha, exec_letter)?, &m_exec);
        let rule_prefix = rule.prefix_word(r);
        let exec_prefix = exec.prefix_word(r);
        for i in 0..=n {
            if outcomes[i].decided_round.is_some() {
                continue;
            }
            if m_exec[i] != m_rule[i] {
                outcomes[i] = ProcessOutcome {
                    decided_round: Some(r),
                    value: Some(sperner::eval_psi_at(alpha, &rule_prefix, &exec_prefix, i, r)?),
                };
            }
        }
        // Exits spread: an undecided process cannot have heard anyone
        // who exited in an earlier round.
        for i in 0..=n {
            if outcomes[i].decided_round.is_some() {
                continue;
            }
            let g = alpha.letter(exec_letter)?;
            if let Some(&j) = g
                .view(i)
                .iter()
                .find(|&&j| outcomes[j].decided_round.is_some_and(|rj| rj < r))
            {
                return Err(Error::PreconditionFailed(format!(
                    "process {i} heard exited process {j} in round {r} yet stayed undecided, \
                     which contradicts persistence of divergence"
                )));
            }
        }
    }
    Ok(TaskRun { horizon, outcomes })
}

/// Task conformance of one run.
#[derive(Debug, Clone)]
pub struct TaskReport {
    pub terminated: bool,
    pub agreement_ok: bool,
    pub validity_ok: bool,
    pub values: BTreeSet<ProcessId>,
}

/// Checks the run against set agreement: everyone decides, at most `n`
/// distinct values, values name processes.
pub fn check_task(alpha: &Alphabet, run: &TaskRun) -> TaskReport {
    let n = alpha.n();
    let values = run.decided_values();
    TaskReport {
        terminated: run.all_decided(),
        agreement_ok: values.len() <= n.max(1),
        validity_ok: values.iter().all(|&v| v <= n),
        values,
    }
}

// ── Adversaries, holes, exclusion ────────────────────────────────────────

/// Whether the adversary delivers the execution: the automaton accepts
/// every prefix and no blacklisted class captures it.
pub fn ma_allows_lasso(alpha: &Alphabet, ma: &AdversaryAutomaton, l: &Lasso) -> Result<bool> {
    if ma.rejects_prefix_at(l).is_some() {
        return Ok(false);
    }
    for b in &ma.blacklist {
        if classes::are_geo_equivalent(alpha, l, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the *whole class* of `l` lies outside the adversary.
///
/// A blacklisted class is excluded wholesale. Otherwise exclusion is
/// certified per cardinality: a singleton needs its one member rejected;
/// a pair needs both members rejected; an infinite class is certified by
/// a depth at which every word of the limit point's preimage is already
/// rejected, so every member has a rejected prefix.
pub fn class_excluded(
    alpha: &Alphabet,
    ma: &AdversaryAutomaton,
    l: &Lasso,
    limits: &Limits,
) -> Result<bool> {
    for b in &ma.blacklist {
        if classes::are_geo_equivalent(alpha, l, b)? {
            return Ok(true);
        }
    }
    let verdict = classes::classify_geo_class(alpha, l)?;
    match verdict.cardinality {
        Cardinality::One => Ok(ma.rejects_prefix_at(l).is_some()),
        Cardinality::Two => {
            let twin = verdict.twin.expect("two-element verdicts carry their twin");
            Ok(ma.rejects_prefix_at(l).is_some() && ma.rejects_prefix_at(&twin).is_some())
        }
        Cardinality::Infinite => {
            let x = geometry::geo_lasso(alpha, l)?;
            for depth in 1..=limits.depth_cap {
                let words = classes::geo_preimage_at_depth(alpha, &x, depth, limits)?;
                if words.iter().all(|w| !ma.allows_word(w)) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// A rejected word of a given length, with a point of the region the
/// adversary thereby gives up and a single-class execution through it.
#[derive(Debug, Clone)]
pub struct HoleReport {
    pub depth: usize,
    pub word: Word,
    pub witness: BaryPoint,
    pub excluded_execution: Lasso,
}

/// The lexicographically smallest length-`depth` word with a rejected
/// prefix, or `None` when the automaton accepts all of them.
pub fn hole_at_depth(
    alpha: &Alphabet,
    ma: &AdversaryAutomaton,
    depth: usize,
) -> Result<Option<HoleReport>> {
    ma.validate(alpha)?;
    if depth == 0 {
        return Ok(None);
    }
    fn dfs(
        ma: &AdversaryAutomaton,
        letters: usize,
        state: usize,
        depth_left: usize,
        word: &mut Word,
    ) -> bool {
        if depth_left == 0 {
            return false;
        }
        for id in 0..letters {
            match ma.transitions.get(&(state, id)) {
                None => {
                    // Everything after a rejection is rejected; the least
                    // continuation pads with the least letter.
                    word.push(id);
                    word.extend(std::iter::repeat_n(0, depth_left - 1));
                    return true;
                }
                Some(&t) => {
                    word.push(id);
                    if dfs(ma, letters, t, depth_left - 1, word) {
                        return true;
                    }
                    word.pop();
                }
            }
        }
        false
    }
    let mut word = Vec::with_capacity(depth);
    if !dfs(ma, alpha.len(), ma.initial, depth, &mut word) {
        return Ok(None);
    }
    let simplex = geometry::geo_prefix(alpha, &word)?;
    let excluded_execution = Lasso::new(word.clone(), vec![alpha.complete_id()])?.normalized();
    Ok(Some(HoleReport {
        depth,
        witness: geometry::barycenter(&simplex),
        word,
        excluded_execution,
    }))
}

// ── Synthesis and verification ───────────────────────────────────────────

/// One probed execution and how the algorithm fared on it.
#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub execution: Lasso,
    pub report: TaskReport,
}

#[derive(Debug, Clone)]
pub struct SynthReport {
    pub rule: Lasso,
    pub probes: Vec<ProbeResult>,
    pub all_ok: bool,
}

impl SynthReport {
    pub fn failures(&self) -> impl Iterator<Item = &ProbeResult> {
        self.probes.iter().filter(|p| {
            !(p.report.terminated && p.report.agreement_ok && p.report.validity_ok)
        })
    }
}

/// Builds the algorithm for `rule` and verifies it on a family of
/// adversary executions: every automaton-allowed word of length `depth`
/// completed by complete rounds, plus deviations taken right after each
/// prefix of the rule. Refuses unless the rule's whole class is
/// certified outside the adversary, without which no algorithm written
/// for it can terminate everywhere.
pub fn synthesize_and_verify(
    alpha: &Alphabet,
    ma: &AdversaryAutomaton,
    rule: &Lasso,
    depth: usize,
    horizon: usize,
    limits: &Limits,
) -> Result<SynthReport> {
    ma.validate(alpha)?;
    limits.check_depth(depth)?;
    if !class_excluded(alpha, ma, rule, limits)? {
        return Err(Error::VerificationRefused(format!(
            "the class of {rule} is not certified outside the adversary"
        )));
    }
    let complete = alpha.complete_id();
    let mut candidates: BTreeSet<Lasso> = BTreeSet::new();

    fn enumerate_allowed(
        ma: &AdversaryAutomaton,
        letters: usize,
        state: usize,
        depth_left: usize,
        word: &mut Word,
        out: &mut Vec<Word>,
    ) {
        if depth_left == 0 {
            out.push(word.clone());
            return;
        }
        for id in 0..letters {
            if let Some(&t) = ma.transitions.get(&(state, id)) {
                word.push(id);
                enumerate_allowed(ma, letters, t, depth_left - 1, word, out);
                word.pop();
            }
        }
    }
    let mut allowed = Vec::new();
    enumerate_allowed(ma, alpha.len(), ma.initial, depth, &mut Vec::new(), &mut allowed);
    for u in allowed {
        candidates.insert(Lasso::new(u, vec![complete])?.normalized());
    }
    // Deviations right after each prefix of the rule catch executions
    // that stay on the rule's path as long as the adversary lets them.
    for t in 0..=depth {
        let u = rule.prefix_word(t);
        if let Some(state) = ma.run(&u) {
            let next_on_rule = rule.letter_at(t + 1);
            for id in 0..alpha.len() {
                if id == next_on_rule {
                    continue;
                }
                if ma.transitions.contains_key(&(state, id)) {
                    let mut w = u.clone();
                    w.push(id);
                    candidates.insert(Lasso::new(w, vec![complete])?.normalized());
                }
            }
        }
    }

    let mut probes = Vec::new();
    for execution in candidates {
        if !ma_allows_lasso(alpha, ma, &execution)? {
            continue;
        }
        let run = run_aw(alpha, rule, &execution, horizon)?;
        let report = check_task(alpha, &run);
        probes.push(ProbeResult { execution, report });
    }
    let all_ok = !probes.is_empty()
        && probes
            .iter()
            .all(|p| p.report.terminated && p.report.agreement_ok && p.report.validity_ok);
    Ok(SynthReport {
        rule: rule.clone(),
        probes,
        all_ok,
    })
}

/// Checks that the algorithm for `rule` is still undecided somewhere at
/// round `t` of an execution shadowing the rule's class.
///
/// The execution must match the class structure: a singleton's member to
/// round `t`, either member of a pair, or (infinite classes) a prefix
/// whose simplex still contains the rule's limit point.
pub fn lower_bound_check(
    alpha: &Alphabet,
    rule: &Lasso,
    exec: &Lasso,
    t: usize,
) -> Result<bool> {
    let verdict = classes::classify_geo_class(alpha, rule)?;
    let rule_n = rule.normalized();
    let exec_ok = match verdict.cardinality {
        Cardinality::One => exec.prefix_word(t) == rule_n.prefix_word(t),
        Cardinality::Two => {
            let twin = verdict.twin.as_ref().expect("pairs carry their twin");
            exec.prefix_word(t) == rule_n.prefix_word(t)
                || exec.prefix_word(t) == twin.prefix_word(t)
        }
        Cardinality::Infinite => {
            let x = geometry::geo_lasso(alpha, &rule_n)?;
            let simplex = geometry::geo_prefix(alpha, &exec.prefix_word(t))?;
            geometry::simplex_contains(&simplex, &x)?
        }
    };
    if !exec_ok {
        return Err(Error::PreconditionFailed(format!(
            "execution does not shadow the rule's class through round {t}"
        )));
    }
    let run = run_aw(alpha, &rule_n, exec, t)?;
    Ok(!run.all_decided())
}

/// Cap on the materialized rejected-word list; counts stay exact.
pub const REJECTED_LIST_MAX: usize = 1000;

/// How much of the depth-`depth` word tree the automaton accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub depth: usize,
    pub total: u128,
    pub allowed: u128,
    pub rejected: u128,
    /// Lexicographically first rejected words, at most
    /// [`REJECTED_LIST_MAX`] of them.
    pub rejected_words: Vec<Word>,
}

pub fn coverage_report(
    alpha: &Alphabet,
    ma: &AdversaryAutomaton,
    depth: usize,
    limits: &Limits,
) -> Result<CoverageReport> {
    ma.validate(alpha)?;
    limits.check_depth(depth)?;
    use std::collections::BTreeMap;
    fn count(
        ma: &AdversaryAutomaton,
        letters: usize,
        state: usize,
        depth_left: usize,
        memo: &mut BTreeMap<(usize, usize), u128>,
    ) -> u128 {
        if depth_left == 0 {
            return 1;
        }
        if let Some(&c) = memo.get(&(state, depth_left)) {
            return c;
        }
        let mut total = 0u128;
        for id in 0..letters {
            if let Some(&t) = ma.transitions.get(&(state, id)) {
                total += count(ma, letters, t, depth_left - 1, memo);
            }
        }
        memo.insert((state, depth_left), total);
        total
    }
    let mut memo = BTreeMap::new();
    let allowed = count(ma, alpha.len(), ma.initial, depth, &mut memo);
    let total = (alpha.len() as u128).pow(depth as u32);

    // Lex DFS collecting rejected words. Subtrees with no rejected leaf
    // are skipped via the memoized live counts, and a dead prefix's
    // completions enumerate until the cap, so the walk is proportional
    // to the emitted list.
    fn collect(
        ma: &AdversaryAutomaton,
        letters: usize,
        state: Option<usize>,
        depth_left: usize,
        word: &mut Word,
        memo: &BTreeMap<(usize, usize), u128>,
        out: &mut Vec<Word>,
    ) {
        if out.len() >= REJECTED_LIST_MAX {
            return;
        }
        if let Some(s) = state {
            let live = if depth_left == 0 {
                1
            } else {
                *memo.get(&(s, depth_left)).expect("counted above")
            };
            if live == (letters as u128).pow(depth_left as u32) {
                return;
            }
        }
        if depth_left == 0 {
            if state.is_none() {
                out.push(word.clone());
            }
            return;
        }
        for id in 0..letters {
            let next = state.and_then(|s| ma.transitions.get(&(s, id)).copied());
            word.push(id);
            collect(ma, letters, next, depth_left - 1, word, memo, out);
            word.pop();
            if out.len() >= REJECTED_LIST_MAX {
                return;
            }
        }
    }
    let mut rejected_words = Vec::new();
    if total - allowed > 0 {
        let mut word = Vec::new();
        collect(
            ma,
            alpha.len(),
            Some(ma.initial),
            depth,
            &mut word,
            &memo,
            &mut rejected_words,
        );
    }
    Ok(CoverageReport {
        depth,
        total,
        allowed,
        rejected: total - allowed,
        rejected_words,
    })
}
