//! Exact-arithmetic toolkit for round-based computability over dynamic
//! graphs whose rounds are immediate-snapshot exchanges.
//!
//! The library materializes a single geometric idea: every infinite
//! execution of an iterated immediate-snapshot system is a shrinking chain
//! of simplices inside the standard chromatic subdivision of a simplex, and
//! the limit point of that chain (`geo`) determines exactly which
//! executions a wait-free observer can tell apart. On top of that sit
//!
//! * [`adversary`] — instant graphs (one-round communication patterns),
//!   finite words and lassos over them, fairness, and safety automata
//!   describing message adversaries;
//! * [`geometry`] — barycentric points, round matrices, the chromatic
//!   subdivision operator, limit points of executions, contraction
//!   certificates, and complex exports (JSON/SVG/OBJ);
//! * [`classes`] — the equivalence "same limit point" and its
//!   one/two/infinite trichotomy, including twin construction;
//! * [`sperner`] — Sperner labellings of subdivided simplices and the
//!   inductive panlabelling that pins the panchromatic simplex onto a
//!   chosen execution;
//! * [`setagreement`] — the decision procedure driven by a panlabelling,
//!   task checking, adversary-hole search, and verification/falsification
//!   harnesses.
//!
//! All geometry is exact: coordinates are arbitrary-precision rationals and
//! every containment, intersection, or volume claim is decided without
//! tolerances. Floating point appears only in presentation-layer exports
//! (SVG/OBJ embeddings).

// Matrix and pivot code indexes by subscript on purpose; iterator chains
// with take/skip obscure which entry is meant.
#![allow(clippy::needless_range_loop)]

pub mod adversary;
pub mod classes;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod setagreement;
pub mod sperner;

pub use error::{Error, Result};

/// Hard limits protecting exponential enumerations.
///
/// `|IS_n|` is a Fubini number (4683 for n = 5) and subdivision complexes
/// grow as `|IS_n|^r`, so both the dimension and enumeration depths are
/// capped. Operations that would exceed a cap return
/// [`Error::LimitExceeded`] instead of attempting the blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest accepted dimension `n` (processes are `0..=n`).
    pub n_cap: usize,
    /// Largest accepted word length / subdivision depth for exhaustive
    /// enumerations (preimages, holes, probe sets).
    pub depth_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            n_cap: 5,
            depth_cap: 8,
        }
    }
}

impl Limits {
    /// Limits with a custom dimension cap and the default depth cap.
    pub fn with_n_cap(n_cap: usize) -> Self {
        Limits {
            n_cap,
            ..Limits::default()
        }
    }

    /// Errors when `n` exceeds the dimension cap.
    pub fn check_n(&self, n: usize) -> Result<()> {
        if n > self.n_cap {
            return Err(Error::LimitExceeded {
                what: "dimension n".into(),
                value: n,
                cap: self.n_cap,
            });
        }
        Ok(())
    }

    /// Errors when an enumeration depth exceeds the depth cap.
    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.depth_cap {
            return Err(Error::LimitExceeded {
                what: "enumeration depth".into(),
                value: depth,
                cap: self.depth_cap,
            });
        }
        Ok(())
    }
}
