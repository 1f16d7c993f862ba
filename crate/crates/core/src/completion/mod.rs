//! Completion of the partial chirotope of a sign pattern.
//!
//! A completion is a full `±` assignment on the bases of `Gr(n, 2n)` that
//! extends the signs forced by `σ`, passes the sign test of every 3-term
//! relation and leaves every enabled feasibility or stability sum able to be
//! positive. Completions are a relaxation: an empty set proves the pattern
//! impossible, a nonempty one proves nothing.
//!
//! ```
//! use coexist_core::completion::{complete, SearchConfig};
//! use coexist_core::model::SignPattern;
//!
//! let mutualism = SignPattern::parse("---+---+---+").unwrap();
//! let set = complete(&mutualism, SearchConfig::default()).unwrap();
//! assert!(set.completions.is_empty());
//! ```

pub mod constraints;
pub mod propagate;
pub mod search;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::grassmann::PartialChirotope;
use crate::model::{sign_string, Sign, SignPattern};
use crate::Error;

pub use constraints::{
    build_feasibility_constraints, build_normalization_constraint, build_stability_constraints,
    constraint_status, ConstraintKind, ConstraintStatus, SignConstraint,
};
pub use propagate::{
    propagate_basis, propagate_fixpoint, BasisInference, Conflict, Fixpoint, Propagator,
};
pub use search::{BranchHeuristic, Search, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub inferences: u64,
    pub conflicts: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.inferences += other.inferences;
        self.conflicts += other.conflicts;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Impossible,
    Possible,
    ResourceLimit,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Impossible => "impossible",
            Verdict::Possible => "possible",
            Verdict::ResourceLimit => "resource-limit",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Completions in ascending order (`+` before `-`, rank order), with statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionSet {
    pub pattern: SignPattern,
    pub config: SearchConfig,
    pub completions: Vec<Vec<Sign>>,
    pub stats: SearchStats,
    /// The node budget ran out before the tree was exhausted.
    pub truncated: bool,
}

impl CompletionSet {
    pub fn count(&self) -> usize {
        self.completions.len()
    }

    /// An empty set is a proof only when the search was neither cut short by
    /// the budget nor stopped at the first hit.
    pub fn verdict(&self) -> Verdict {
        if !self.completions.is_empty() {
            Verdict::Possible
        } else if self.truncated {
            Verdict::ResourceLimit
        } else {
            Verdict::Impossible
        }
    }

    pub fn completion_strings(&self) -> Vec<String> {
        self.completions.iter().map(|c| sign_string(c)).collect()
    }

    pub fn contains(&self, chirotope: &[Sign]) -> bool {
        self.completions
            .binary_search_by(|c| c.as_slice().cmp(chirotope))
            .is_ok()
    }

    /// Combines subtree results into one deterministic set.
    pub fn merge(parts: Vec<CompletionSet>) -> CompletionSet {
        let mut iter = parts.into_iter();
        let mut out = iter.next().expect("at least one part");
        for part in iter {
            out.completions.extend(part.completions);
            out.stats.absorb(&part.stats);
            out.truncated |= part.truncated;
        }
        out.completions.sort();
        out.completions.dedup();
        if !out.config.collect_all {
            out.completions.truncate(1);
        }
        out
    }
}

/// Runs the full search for `sp`.
pub fn complete(sp: &SignPattern, cfg: SearchConfig) -> Result<CompletionSet, Error> {
    Ok(Search::new(sp, cfg)?.run())
}

/// Outcome of [`certify_impossible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Impossible(CompletionSet),
    Possible(CompletionSet),
    ResourceLimit(CompletionSet),
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Impossible(_) => Verdict::Impossible,
            Certificate::Possible(_) => Verdict::Possible,
            Certificate::ResourceLimit(_) => Verdict::ResourceLimit,
        }
    }

    pub fn completions(&self) -> &CompletionSet {
        match self {
            Certificate::Impossible(c)
            | Certificate::Possible(c)
            | Certificate::ResourceLimit(c) => c,
        }
    }
}

/// Decides the pattern with every check enabled and all completions collected.
pub fn certify_impossible(sp: &SignPattern) -> Result<Certificate, Error> {
    certify_with(sp, SearchConfig::default())
}

/// As [`certify_impossible`] with a custom budget or heuristic; the checks and
/// `collect_all` are forced on.
pub fn certify_with(sp: &SignPattern, cfg: SearchConfig) -> Result<Certificate, Error> {
    let cfg = SearchConfig {
        enable_feasibility: true,
        enable_stability: true,
        det_b_positive: true,
        collect_all: true,
        ..cfg
    };
    let set = complete(sp, cfg)?;
    Ok(match set.verdict() {
        Verdict::Impossible => Certificate::Impossible(set),
        Verdict::Possible => Certificate::Possible(set),
        Verdict::ResourceLimit => Certificate::ResourceLimit(set),
    })
}

/// The completions of `σ∘π` obtained from those of `σ`.
pub fn relabel_completions(n: usize, completions: &[Vec<Sign>], perm: &[usize]) -> Vec<Vec<Sign>> {
    let mut out: Vec<Vec<Sign>> = completions
        .iter()
        .map(|c| {
            PartialChirotope::from_signs(n, c)
                .relabel(perm)
                .to_signs()
                .expect("complete")
        })
        .collect();
    out.sort();
    out
}
