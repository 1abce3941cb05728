//! Crate-wide error type.
//!
//! One enum serves all modules: the operations are deeply interlinked (a
//! classification error surfaces through the solver, a parse error through
//! the CLI), and each variant carries the witness data a caller needs to
//! report the failure precisely.

use thiserror::Error;

/// Alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A process id is outside `0..=n`.
    #[error("process id {id} out of range for n = {n}")]
    ProcessOutOfRange { id: usize, n: usize },

    /// An instant graph misses a self-loop.
    #[error("instant graph invalid: process {0} does not see itself")]
    MissingSelfLoop(usize),

    /// An instant graph has a pair with no arc in either direction.
    #[error("instant graph invalid: no arc between {0} and {1} in either direction (containment)")]
    ContainmentViolation(usize, usize),

    /// An instant graph has a two-hop arc without its shortcut.
    #[error(
        "instant graph invalid: {q} sees {p} and {r} sees {q} but {r} does not see {p} (immediacy)"
    )]
    ImmediacyViolation { p: usize, q: usize, r: usize },

    /// A views table does not cover exactly the processes `0..=n`.
    #[error("instant graph invalid: expected views for {expected} processes, got {got}")]
    WrongArity { expected: usize, got: usize },

    /// A letter id is outside the alphabet.
    #[error("letter id {id} out of range: |IS_{n}| = {size}")]
    LetterOutOfRange { id: usize, n: usize, size: usize },

    /// A lasso has an empty period.
    #[error("lasso period must be non-empty")]
    EmptyPeriod,

    /// Dimension or depth cap exceeded.
    #[error("{what} = {value} exceeds the configured cap {cap}")]
    LimitExceeded {
        what: String,
        value: usize,
        cap: usize,
    },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected n = {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A barycentric point fails its invariants.
    #[error("invalid barycentric point: {0}")]
    InvalidBaryPoint(String),

    /// A simplex is degenerate (vertices affinely dependent).
    #[error("degenerate simplex: {0}")]
    DegenerateSimplex(String),

    /// A linear system has no (unique) solution where one is required.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// A subdivision failed verification; the message carries the witness.
    #[error("subdivision check failed: {0}")]
    SubdivisionCheck(String),

    /// A labelling failed verification.
    #[error("labelling check failed: {0}")]
    LabellingCheck(String),

    /// An operation was given a lasso of the wrong classification.
    #[error("classification mismatch: {0}")]
    ClassMismatch(String),

    /// The solver's correctness precondition does not hold.
    #[error("verification refused: {0}")]
    VerificationRefused(String),

    /// A task-run precondition does not hold.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// Adversary-description file is malformed.
    #[error("adversary file, line {line}: {reason}")]
    AdversaryParse { line: usize, reason: String },

    /// Adversary-description file is well-formed but inconsistent.
    #[error("adversary invalid: {0}")]
    AdversaryInvalid(String),

    /// A requested export is not available for this dimension.
    #[error("unsupported export: {0}")]
    UnsupportedExport(String),

    /// Malformed complex JSON.
    #[error("complex JSON invalid: {0}")]
    ComplexParse(String),

    /// Filesystem error surfaced by the CLI layer.
    #[error("io error on {path}: {reason}")]
    Io { path: String, reason: String },
}
