//! One-round communication patterns, infinite executions, and message
//! adversaries.
//!
//! A round of the system is an *instant graph*: a digraph on the processes
//! `0..=n` in which every process sees itself, every pair is connected in
//! at least one direction (containment), and a view seen indirectly is
//! seen directly (immediacy). These are exactly the one-round immediate
//! snapshot patterns; equivalently, ordered set partitions of the process
//! set, which is how [`Alphabet::generate`] enumerates them.
//!
//! Infinite executions are represented as *lassos* `prefix · period^ω`.
//! A message adversary is a safety automaton over letter ids plus an
//! optional blacklist of lassos whose whole limit-point classes are
//! excluded (the class machinery lives in [`crate::classes`]).

use crate::error::{Error, Result};
use crate::Limits;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Index of a process, `0..=n`.
pub type ProcessId = usize;

/// Index of a letter in the deterministic catalogue of an [`Alphabet`].
pub type LetterId = usize;

/// A finite word over letter ids. Rounds are 1-indexed throughout the
/// crate: the letter of round `r` is `word[r - 1]`.
pub type Word = Vec<LetterId>;

// ── Instant graphs ───────────────────────────────────────────────────────

/// A one-round communication pattern on processes `0..=n`.
///
/// `views[q]` is the set of processes whose round message `q` receives,
/// always including `q` itself. Valid instant graphs satisfy containment
/// and immediacy, which forces the views to form a chain of prefix unions
/// of an ordered set partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstantGraph {
    n: usize,
    views: Vec<BTreeSet<ProcessId>>,
}

impl InstantGraph {
    /// Builds and validates an instant graph from per-process views.
    pub fn new(n: usize, views: Vec<BTreeSet<ProcessId>>) -> Result<Self> {
        let g = InstantGraph { n, views };
        g.validate()?;
        Ok(g)
    }

    /// Builds the letter corresponding to an ordered set partition: a
    /// process in the j-th block sees the union of blocks `1..=j`.
    pub fn from_ordered_partition(n: usize, blocks: &[Vec<ProcessId>]) -> Result<Self> {
        let mut views = vec![BTreeSet::new(); n + 1];
        let mut acc: BTreeSet<ProcessId> = BTreeSet::new();
        for block in blocks {
            acc.extend(block.iter().copied());
            for &q in block {
                if q > n {
                    return Err(Error::ProcessOutOfRange { id: q, n });
                }
                views[q] = acc.clone();
            }
        }
        Self::new(n, views)
    }

    /// The complete letter: every process sees every process.
    pub fn complete(n: usize) -> Self {
        let all: BTreeSet<ProcessId> = (0..=n).collect();
        InstantGraph {
            n,
            views: vec![all; n + 1],
        }
    }

    /// Checks self-reception, containment, and immediacy, in that order,
    /// returning the first violated property with its witness.
    pub fn validate(&self) -> Result<()> {
        if self.views.len() != self.n + 1 {
            return Err(Error::WrongArity {
                expected: self.n + 1,
                got: self.views.len(),
            });
        }
        for (q, view) in self.views.iter().enumerate() {
            if let Some(&p) = view.iter().find(|&&p| p > self.n) {
                return Err(Error::ProcessOutOfRange { id: p, n: self.n });
            }
            if !view.contains(&q) {
                return Err(Error::MissingSelfLoop(q));
            }
        }
        for a in 0..=self.n {
            for b in a + 1..=self.n {
                if !self.sees(b, a) && !self.sees(a, b) {
                    return Err(Error::ContainmentViolation(a, b));
                }
            }
        }
        // Immediacy: arcs (p,q) and (q,r) force the shortcut (p,r).
        for q in 0..=self.n {
            for &p in &self.views[q] {
                for r in 0..=self.n {
                    if self.sees(r, q) && !self.sees(r, p) {
                        return Err(Error::ImmediacyViolation { p, q, r });
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimension: processes are `0..=n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The set of processes `q` receives from (including `q`).
    pub fn view(&self, q: ProcessId) -> &BTreeSet<ProcessId> {
        &self.views[q]
    }

    /// Whether `q` receives the round message of `p`.
    pub fn sees(&self, q: ProcessId, p: ProcessId) -> bool {
        self.views[q].contains(&p)
    }

    /// Whether every process of `p_set` receives only from `p_set`.
    pub fn is_solo(&self, p_set: &BTreeSet<ProcessId>) -> bool {
        p_set.iter().all(|&q| self.views[q].is_subset(p_set))
    }

    /// Per-process view bitmasks, the sort key of the catalogue.
    pub fn view_masks(&self) -> Vec<u64> {
        self.views
            .iter()
            .map(|v| v.iter().fold(0u64, |m, &p| m | (1 << p)))
            .collect()
    }
}

impl fmt::Display for InstantGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, view) in self.views.iter().enumerate() {
            if q > 0 {
                write!(f, " ")?;
            }
            let ids: Vec<String> = view.iter().map(|p| p.to_string()).collect();
            write!(f, "{}<-{{{}}}", q, ids.join(","))?;
        }
        Ok(())
    }
}

// ── The alphabet IS_n ────────────────────────────────────────────────────

/// The catalogue of all instant graphs on `0..=n`, in a deterministic
/// order (ascending lexicographic view-mask key). Letter ids used in
/// words, lassos, adversary files, and the CLI index into this catalogue.
#[derive(Debug, Clone)]
pub struct Alphabet {
    n: usize,
    letters: Vec<InstantGraph>,
    index: BTreeMap<Vec<u64>, LetterId>,
}

impl Alphabet {
    /// Enumerates `IS_n` by ordered set partitions and sorts by view-mask
    /// key. Sizes are the Fubini numbers: 1, 3, 13, 75, 541, 4683 for
    /// n = 0..=5.
    pub fn generate(n: usize, limits: &Limits) -> Result<Self> {
        limits.check_n(n)?;
        let elems: Vec<ProcessId> = (0..=n).collect();
        let mut letters = Vec::new();
        let mut blocks: Vec<Vec<ProcessId>> = Vec::new();
        enumerate_partitions(&elems, &mut blocks, &mut |bs| {
            letters.push(
                InstantGraph::from_ordered_partition(n, bs)
                    .expect("ordered partitions always yield valid instant graphs"),
            );
        });
        letters.sort_by_key(|g| g.view_masks());
        let index = letters
            .iter()
            .enumerate()
            .map(|(i, g)| (g.view_masks(), i))
            .collect();
        Ok(Alphabet { n, letters, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letter for an id, or an error naming the valid range.
    pub fn letter(&self, id: LetterId) -> Result<&InstantGraph> {
        self.letters.get(id).ok_or(Error::LetterOutOfRange {
            id,
            n: self.n,
            size: self.letters.len(),
        })
    }

    /// All letters in catalogue order.
    pub fn letters(&self) -> &[InstantGraph] {
        &self.letters
    }

    /// The id of a letter, if it belongs to this alphabet.
    pub fn id_of(&self, g: &InstantGraph) -> Option<LetterId> {
        if g.n() != self.n {
            return None;
        }
        self.index.get(&g.view_masks()).copied()
    }

    /// Id of the complete letter (every process sees every process).
    pub fn complete_id(&self) -> LetterId {
        self.id_of(&InstantGraph::complete(self.n))
            .expect("complete letter is always in the catalogue")
    }

    /// Ids of the letters in which `p_set` receives only from itself, in
    /// catalogue order. With `p_set` the full process set this is the
    /// whole alphabet.
    pub fn solo(&self, p_set: &BTreeSet<ProcessId>) -> Vec<LetterId> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_solo(p_set))
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks every id of a word against the catalogue.
    pub fn check_word(&self, word: &[LetterId]) -> Result<()> {
        for &id in word {
            self.letter(id)?;
        }
        Ok(())
    }
}

fn enumerate_partitions(
    rest: &[ProcessId],
    blocks: &mut Vec<Vec<ProcessId>>,
    emit: &mut impl FnMut(&[Vec<ProcessId>]),
) {
    if rest.is_empty() {
        emit(blocks);
        return;
    }
    // Choose every non-empty subset of `rest` as the next block.
    let k = rest.len();
    for mask in 1u32..(1 << k) {
        let block: Vec<ProcessId> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| rest[i]).collect();
        let remaining: Vec<ProcessId> = (0..k)
            .filter(|i| mask & (1 << i) == 0)
            .map(|i| rest[i])
            .collect();
        blocks.push(block);
        enumerate_partitions(&remaining, blocks, emit);
        blocks.pop();
    }
}

// ── Lassos ───────────────────────────────────────────────────────────────

/// An eventually periodic infinite word `prefix · period^ω` over letter
/// ids. Equality is structural; [`Lasso::normalized`] produces the unique
/// minimal-preperiod, primitive-period representation of the same infinite
/// word and is what hashing and word-level comparison use.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso {
    pub prefix: Vec<LetterId>,
    pub period: Vec<LetterId>,
}

impl Lasso {
    pub fn new(prefix: Vec<LetterId>, period: Vec<LetterId>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(Lasso { prefix, period })
    }

    /// The letter of round `r` (1-indexed).
    pub fn letter_at(&self, r: usize) -> LetterId {
        assert!(r >= 1, "rounds are 1-indexed");
        let i = r - 1;
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `len` letters as a finite word.
    pub fn prefix_word(&self, len: usize) -> Word {
        (1..=len).map(|r| self.letter_at(r)).collect()
    }

    /// The lasso obtained by dropping the first `offset` letters.
    pub fn suffix(&self, offset: usize) -> Lasso {
        if offset <= self.prefix.len() {
            Lasso {
                prefix: self.prefix[offset..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let k = (offset - self.prefix.len()) % self.period.len();
            let mut period = self.period[k..].to_vec();
            period.extend_from_slice(&self.period[..k]);
            Lasso {
                prefix: Vec::new(),
                period,
            }
        }
    }

    /// Canonical form: primitive period, then the shortest possible
    /// prefix (absorbing prefix letters into rotations of the period).
    /// Two lassos denote the same infinite word iff their normal forms
    /// are identical. Rotating the period is only sound when compensated
    /// by the prefix, which is why plain structural equality keeps the
    /// representation as given.
    pub fn normalized(&self) -> Lasso {
        let mut prefix = self.prefix.clone();
        let mut period = primitive_root(&self.period);
        while let Some(&last) = prefix.last() {
            if last != *period.last().expect("period is non-empty") {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        period = primitive_root(&period);
        Lasso { prefix, period }
    }

    /// Whether two lassos denote the same infinite word.
    pub fn same_word(&self, other: &Lasso) -> bool {
        self.normalized() == other.normalized()
    }

    /// Rounds after which the suffix structure repeats: scanning suffix
    /// offsets `0..=stabilization_bound()` covers all distinct suffixes.
    pub fn stabilization_bound(&self) -> usize {
        self.prefix.len() + self.period.len()
    }
}

fn primitive_root(period: &[LetterId]) -> Vec<LetterId> {
    let len = period.len();
    for d in 1..=len {
        if !len.is_multiple_of(d) {
            continue;
        }
        if (d..len).all(|i| period[i] == period[i - d]) {
            return period[..d].to_vec();
        }
    }
    period.to_vec()
}

impl fmt::Display for Lasso {
    /// `"p1 p2 ; q1 q2"`: prefix ids, a semicolon, period ids.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_ids = |ids: &[LetterId]| {
            ids.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "{} ; {}", fmt_ids(&self.prefix), fmt_ids(&self.period))
    }
}

impl FromStr for Lasso {
    type Err = Error;

    /// Parses `"prefix-ids ; period-ids"`, ids separated by spaces or
    /// commas; the prefix may be empty (`"; 3"`).
    fn from_str(s: &str) -> Result<Self> {
        let parse_ids = |part: &str| -> Result<Vec<LetterId>> {
            part.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::AdversaryParse {
                        line: 0,
                        reason: format!("bad letter id {t:?} in lasso"),
                    })
                })
                .collect()
        };
        let (pre, per) = s.split_once(';').ok_or_else(|| Error::AdversaryParse {
            line: 0,
            reason: "lasso must be \"prefix ; period\"".into(),
        })?;
        Lasso::new(parse_ids(pre)?, parse_ids(per)?)
    }
}

// ── Journeys and fairness ────────────────────────────────────────────────

/// Whether a causal chain from `p` reaches `q` when started at time `r`:
/// a sequence of arcs at strictly increasing rounds, the first one no
/// earlier than round `r + 1`. The empty chain handles `p = q`.
///
/// Decided by saturating the reachable set: it grows monotonically, and
/// on a lasso a full period without growth (past the prefix) means it
/// never grows again.
pub fn journey_exists(
    alpha: &Alphabet,
    l: &Lasso,
    p: ProcessId,
    q: ProcessId,
    r: usize,
) -> Result<bool> {
    if p > alpha.n() {
        return Err(Error::ProcessOutOfRange { id: p, n: alpha.n() });
    }
    if q > alpha.n() {
        return Err(Error::ProcessOutOfRange { id: q, n: alpha.n() });
    }
    alpha.check_word(&l.prefix)?;
    alpha.check_word(&l.period)?;
    let mut reach: BTreeSet<ProcessId> = BTreeSet::new();
    reach.insert(p);
    // (n+1) strict growths at most, each within one period past the prefix.
    let horizon = r + l.prefix.len() + (alpha.n() + 2) * l.period.len();
    for t in (r + 1)..=horizon {
        let g = alpha.letter(l.letter_at(t))?;
        let grown: Vec<ProcessId> = (0..=alpha.n())
            .filter(|&x| !reach.contains(&x) && g.view(x).iter().any(|s| reach.contains(s)))
            .collect();
        reach.extend(grown);
        if reach.contains(&q) {
            return Ok(true);
        }
    }
    Ok(reach.contains(&q))
}

/// Whether `l` is fair on `p_set`: every letter keeps `p_set` isolated
/// from the outside, and within `p_set` every process influences every
/// other at every time. The second half reduces on a lasso to: no proper
/// non-empty `q_set ⊂ p_set` has the whole period inside its solo set
/// (such a `q_set` would yield a suffix in `Solo(q_set)^ω`, and any
/// infinite suffix contains every period letter).
pub fn is_fair(alpha: &Alphabet, l: &Lasso, p_set: &BTreeSet<ProcessId>) -> Result<bool> {
    if p_set.is_empty() {
        return Err(Error::PreconditionFailed("fairness set must be non-empty".into()));
    }
    if let Some(&p) = p_set.iter().find(|&&p| p > alpha.n()) {
        return Err(Error::ProcessOutOfRange { id: p, n: alpha.n() });
    }
    alpha.check_word(&l.prefix)?;
    alpha.check_word(&l.period)?;
    let all_letters: Vec<&InstantGraph> = l
        .prefix
        .iter()
        .chain(l.period.iter())
        .map(|&id| alpha.letter(id).expect("checked above"))
        .collect();
    if !all_letters.iter().all(|g| g.is_solo(p_set)) {
        return Ok(false);
    }
    let members: Vec<ProcessId> = p_set.iter().copied().collect();
    let k = members.len();
    for mask in 1u32..((1u32 << k) - 1) {
        let q_set: BTreeSet<ProcessId> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| members[i])
            .collect();
        let period_trapped = l
            .period
            .iter()
            .all(|&id| alpha.letter(id).expect("checked above").is_solo(&q_set));
        if period_trapped {
            return Ok(false);
        }
    }
    Ok(true)
}

// ── Safety automata ──────────────────────────────────────────────────────

/// A message adversary: the words whose every prefix the automaton
/// accepts, minus the limit-point classes of the blacklisted lassos.
///
/// The transition function is partial; a missing transition rejects. The
/// structure is validated on construction: all states reachable, ids in
/// range, no conflicting transitions, and the embedded letter count must
/// match `|IS_n|` so a file written for one catalogue cannot silently be
/// replayed against another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryAutomaton {
    pub n: usize,
    pub states: Vec<String>,
    pub initial: usize,
    /// `(state, letter) → state`.
    pub transitions: BTreeMap<(usize, LetterId), usize>,
    pub blacklist: Vec<Lasso>,
}

impl AdversaryAutomaton {
    /// The full adversary: one state accepting every letter, no blacklist.
    pub fn full(alpha: &Alphabet) -> Self {
        let transitions = (0..alpha.len()).map(|id| ((0, id), 0)).collect();
        AdversaryAutomaton {
            n: alpha.n(),
            states: vec!["q0".into()],
            initial: 0,
            transitions,
            blacklist: Vec::new(),
        }
    }

    /// Structural validation against a catalogue.
    pub fn validate(&self, alpha: &Alphabet) -> Result<()> {
        if self.n != alpha.n() {
            return Err(Error::DimensionMismatch {
                expected: alpha.n(),
                got: self.n,
            });
        }
        if self.states.is_empty() {
            return Err(Error::AdversaryInvalid("no states declared".into()));
        }
        if self.initial >= self.states.len() {
            return Err(Error::AdversaryInvalid("initial state undeclared".into()));
        }
        for (&(s, id), &t) in &self.transitions {
            if s >= self.states.len() || t >= self.states.len() {
                return Err(Error::AdversaryInvalid(format!(
                    "transition ({s}, {id}) -> {t} references an undeclared state"
                )));
            }
            alpha.letter(id)?;
        }
        // Every declared state must be reachable from the initial one.
        let mut seen = vec![false; self.states.len()];
        seen[self.initial] = true;
        let mut frontier = vec![self.initial];
        while let Some(s) = frontier.pop() {
            for (&(from, _), &to) in &self.transitions {
                if from == s && !seen[to] {
                    seen[to] = true;
                    frontier.push(to);
                }
            }
        }
        if let Some(dead) = seen.iter().position(|&s| !s) {
            return Err(Error::AdversaryInvalid(format!(
                "state {} is unreachable",
                self.states[dead]
            )));
        }
        for l in &self.blacklist {
            alpha.check_word(&l.prefix)?;
            alpha.check_word(&l.period)?;
        }
        Ok(())
    }

    /// Whether the automaton accepts every prefix of the word.
    pub fn allows_word(&self, word: &[LetterId]) -> bool {
        let mut state = self.initial;
        for &id in word {
            match self.transitions.get(&(state, id)) {
                Some(&t) => state = t,
                None => return false,
            }
        }
        true
    }

    /// The automaton state after reading `word`, if every step exists.
    pub fn run(&self, word: &[LetterId]) -> Option<usize> {
        let mut state = self.initial;
        for &id in word {
            state = *self.transitions.get(&(state, id))?;
        }
        Some(state)
    }

    /// The first round at which some prefix of the lasso is rejected, or
    /// `None` if the automaton survives forever. Decidable by pumping: a
    /// repeated (state, period-position) pair survives all the way.
    pub fn rejects_prefix_at(&self, l: &Lasso) -> Option<usize> {
        let mut state = self.initial;
        for (i, &id) in l.prefix.iter().enumerate() {
            match self.transitions.get(&(state, id)) {
                Some(&t) => state = t,
                None => return Some(i + 1),
            }
        }
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut round = l.prefix.len();
        loop {
            let pos = (round - l.prefix.len()) % l.period.len();
            if !seen.insert((state, pos)) {
                return None;
            }
            match self.transitions.get(&(state, l.period[pos])) {
                Some(&t) => state = t,
                None => return Some(round + 1),
            }
            round += 1;
        }
    }

    /// Renders the automaton in the adversary file format parsed by
    /// [`AdversaryAutomaton::parse`].
    pub fn to_file_string(&self, alpha: &Alphabet) -> String {
        let mut out = String::new();
        out.push_str(&format!("n: {}\n", self.n));
        out.push_str(&format!("letters: {}\n", alpha.len()));
        out.push_str(&format!("states: {}\n", self.states.join(" ")));
        out.push_str(&format!("initial: {}\n", self.states[self.initial]));
        for (&(s, id), &t) in &self.transitions {
            out.push_str(&format!(
                "transition: {} {} {}\n",
                self.states[s], id, self.states[t]
            ));
        }
        for l in &self.blacklist {
            out.push_str(&format!("blacklist: {l}\n"));
        }
        out
    }

    /// Parses the adversary file format:
    ///
    /// ```text
    /// # comment
    /// n: 2
    /// letters: 13          # must equal |IS_2|; the file self-checks
    /// states: q0 q1
    /// initial: q0
    /// transition: q0 5 q1
    /// blacklist: 2 ; 0     # lasso "prefix ; period" over letter ids
    /// ```
    pub fn parse(text: &str, alpha: &Alphabet) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut letters: Option<usize> = None;
        let mut states: Vec<String> = Vec::new();
        let mut initial: Option<String> = None;
        let mut raw_transitions: Vec<(usize, String, LetterId, String)> = Vec::new();
        let mut blacklist: Vec<Lasso> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once(':').ok_or_else(|| Error::AdversaryParse {
                line,
                reason: "expected \"key: value\"".into(),
            })?;
            let value = value.trim();
            match key.trim() {
                "n" => {
                    n = Some(value.parse().map_err(|_| Error::AdversaryParse {
                        line,
                        reason: format!("bad n {value:?}"),
                    })?)
                }
                "letters" => {
                    letters = Some(value.parse().map_err(|_| Error::AdversaryParse {
                        line,
                        reason: format!("bad letter count {value:?}"),
                    })?)
                }
                "states" => {
                    states = value.split_whitespace().map(str::to_string).collect();
                }
                "initial" => initial = Some(value.to_string()),
                "transition" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(Error::AdversaryParse {
                            line,
                            reason: "transition needs \"state letter-id state\"".into(),
                        });
                    }
                    let id = parts[1].parse().map_err(|_| Error::AdversaryParse {
                        line,
                        reason: format!("bad letter id {:?}", parts[1]),
                    })?;
                    raw_transitions.push((line, parts[0].into(), id, parts[2].into()));
                }
                "blacklist" => {
                    let lasso = value.parse::<Lasso>().map_err(|e| match e {
                        Error::AdversaryParse { reason, .. } => Error::AdversaryParse { line, reason },
                        other => other,
                    })?;
                    blacklist.push(lasso);
                }
                other => {
                    return Err(Error::AdversaryParse {
                        line,
                        reason: format!("unknown key {other:?}"),
                    })
                }
            }
        }

        let n = n.ok_or_else(|| Error::AdversaryParse {
            line: 0,
            reason: "missing \"n:\"".into(),
        })?;
        if n != alpha.n() {
            return Err(Error::DimensionMismatch {
                expected: alpha.n(),
                got: n,
            });
        }
        let letters = letters.ok_or_else(|| Error::AdversaryParse {
            line: 0,
            reason: "missing \"letters:\" (files must pin the catalogue size)".into(),
        })?;
        if letters != alpha.len() {
            return Err(Error::AdversaryInvalid(format!(
                "file expects {} letters but |IS_{}| = {}",
                letters,
                alpha.n(),
                alpha.len()
            )));
        }
        let state_id = |name: &str, line: usize| -> Result<usize> {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::AdversaryParse {
                    line,
                    reason: format!("undeclared state {name:?}"),
                })
        };
        let initial_name = initial.ok_or_else(|| Error::AdversaryParse {
            line: 0,
            reason: "missing \"initial:\"".into(),
        })?;
        let initial = state_id(&initial_name, 0)?;
        let mut transitions = BTreeMap::new();
        for (line, from, id, to) in raw_transitions {
            let key = (state_id(&from, line)?, id);
            let to = state_id(&to, line)?;
            if let Some(&old) = transitions.get(&key) {
                if old != to {
                    return Err(Error::AdversaryInvalid(format!(
                        "nondeterministic: two transitions from {from} on letter {id}"
                    )));
                }
            }
            transitions.insert(key, to);
        }
        let automaton = AdversaryAutomaton {
            n,
            states,
            initial,
            transitions,
            blacklist,
        };
        automaton.validate(alpha)?;
        Ok(automaton)
    }
}
