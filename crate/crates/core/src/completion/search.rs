//! Depth-first branching over unknown bases with propagation at every node.

use alloc::vec::Vec;

use crate::grassmann::{partial_chirotope_with, Initialization, PartialChirotope, TriSign};
use crate::model::{Sign, SignPattern};
use crate::Error;

use super::constraints::{
    build_feasibility_constraints, build_normalization_constraint, build_stability_constraints,
};
use super::propagate::{Conflict, Propagator};
use super::{CompletionSet, SearchStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchHeuristic {
    /// The unknown with the most nearly-determined relations and constraints;
    /// ties go to the lowest rank.
    #[default]
    MostConstrained,
    LowestRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub enable_feasibility: bool,
    pub enable_stability: bool,
    /// Require `det B > 0` even when both checks are off.
    pub det_b_positive: bool,
    pub branch_heuristic: BranchHeuristic,
    pub max_nodes: u64,
    pub collect_all: bool,
    pub initialization: Initialization,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            enable_feasibility: true,
            enable_stability: true,
            det_b_positive: true,
            branch_heuristic: BranchHeuristic::MostConstrained,
            max_nodes: 50_000_000,
            collect_all: true,
            initialization: Initialization::Generalized,
        }
    }
}

impl SearchConfig {
    /// The 3-term relations under `det B > 0`, without feasibility or
    /// stability sums.
    pub fn chirotope_only() -> Self {
        Self {
            enable_feasibility: false,
            enable_stability: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.max_nodes == 0 {
            return Err(Error::Config("max_nodes must be positive".into()));
        }
        Ok(())
    }
}

/// A prepared search for one sign pattern.
#[derive(Debug, Clone)]
pub struct Search {
    pattern: SignPattern,
    config: SearchConfig,
    propagator: Propagator,
    initial: PartialChirotope,
}

#[derive(Clone, Copy)]
enum Step {
    Root,
    Assigned(usize),
    Propagated,
}

struct Run<'a> {
    search: &'a Search,
    stats: SearchStats,
    found: Vec<Vec<Sign>>,
    truncated: bool,
    stopped: bool,
}

impl Search {
    pub fn new(pattern: &SignPattern, config: SearchConfig) -> Result<Self, Error> {
        config.validate()?;
        let n = pattern.n();
        if !(2..=crate::grassmann::MAX_N).contains(&n) {
            return Err(Error::Unsupported {
                n,
                max: crate::grassmann::MAX_N,
            });
        }
        let mut constraints = Vec::new();
        if config.det_b_positive && !config.enable_stability {
            constraints.push(build_normalization_constraint(n));
        }
        if config.enable_feasibility {
            constraints.extend(build_feasibility_constraints(n));
        }
        if config.enable_stability {
            constraints.extend(build_stability_constraints(pattern));
        }
        Ok(Self {
            pattern: pattern.clone(),
            config,
            propagator: Propagator::new(n, constraints),
            initial: partial_chirotope_with(pattern, config.initialization),
        })
    }

    pub fn pattern(&self) -> &SignPattern {
        &self.pattern
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn initial(&self) -> &PartialChirotope {
        &self.initial
    }

    /// Propagates the initial assignment; the conflict, if any, refutes the
    /// pattern without branching.
    pub fn root(&self) -> Result<PartialChirotope, Conflict> {
        let mut chi = self.initial.clone();
        let mut inferences = 0;
        self.propagator
            .propagate_all(&mut chi.chi, &mut inferences)?;
        Ok(chi)
    }

    /// Runs the whole search single-threaded.
    pub fn run(&self) -> CompletionSet {
        let mut run = self.start();
        run.node(self.initial.chi.clone(), Step::Root);
        run.finish()
    }

    /// Runs the subtree below an already propagated node.
    pub fn run_from(&self, node: &PartialChirotope) -> CompletionSet {
        let mut run = self.start();
        run.node(node.chi.clone(), Step::Propagated);
        run.finish()
    }

    /// Expands the tree breadth-first until at least `width` open nodes exist
    /// or nothing is left to expand. Completions met on the way are returned
    /// in the partial set.
    pub fn split(&self, width: usize) -> (CompletionSet, Vec<PartialChirotope>) {
        let mut run = self.start();
        let mut open: Vec<Vec<TriSign>> = Vec::new();
        if let Some(chi) = run.settle(self.initial.chi.clone(), Step::Root) {
            open.push(chi);
        }
        while !open.is_empty() && open.len() < width && !run.truncated {
            let mut next = Vec::new();
            for chi in open {
                let b = self.choose(&chi);
                for s in [Sign::Plus, Sign::Minus] {
                    let mut child = chi.clone();
                    child[b] = s.into();
                    if let Some(c) = run.settle(child, Step::Assigned(b)) {
                        next.push(c);
                    }
                }
            }
            open = next;
        }
        let nodes = open
            .into_iter()
            .map(|chi| PartialChirotope {
                n: self.pattern.n(),
                chi,
            })
            .collect();
        (run.finish(), nodes)
    }

    fn start(&self) -> Run<'_> {
        Run {
            search: self,
            stats: SearchStats::default(),
            found: Vec::new(),
            truncated: false,
            stopped: false,
        }
    }

    fn choose(&self, chi: &[TriSign]) -> usize {
        let unknown = (0..chi.len()).filter(|&b| !chi[b].is_known());
        match self.config.branch_heuristic {
            BranchHeuristic::LowestRank => unknown.min().expect("an unknown basis"),
            BranchHeuristic::MostConstrained => {
                let mut best = (0usize, usize::MAX);
                for b in unknown {
                    let score = self.pressure(chi, b);
                    if best.1 == usize::MAX || score > best.0 {
                        best = (score, b);
                    }
                }
                best.1
            }
        }
    }

    // incident items where every other basis but at most one is known
    fn pressure(&self, chi: &[TriSign], b: usize) -> usize {
        let prop = &self.propagator;
        let nrel = prop.relations().len();
        prop.incident(b)
            .iter()
            .filter(|&&item| {
                let open = if item < nrel {
                    prop.relations()[item]
                        .bases()
                        .iter()
                        .filter(|&&x| x != b && !chi[x].is_known())
                        .count()
                } else {
                    prop.constraints()[item - nrel]
                        .terms
                        .iter()
                        .filter(|&&(x, _)| x != b && !chi[x].is_known())
                        .count()
                };
                open <= 1
            })
            .count()
    }
}

impl Run<'_> {
    /// Counts a node, propagates and records a completion. Returns the
    /// assignment when it still needs branching.
    fn settle(&mut self, mut chi: Vec<TriSign>, step: Step) -> Option<Vec<TriSign>> {
        if self.stopped {
            return None;
        }
        if self.stats.nodes >= self.search.config.max_nodes {
            self.truncated = true;
            self.stopped = true;
            return None;
        }
        self.stats.nodes += 1;
        let prop = &self.search.propagator;
        let result = match step {
            Step::Root => prop.propagate_all(&mut chi, &mut self.stats.inferences),
            Step::Assigned(b) => prop.propagate_from(&mut chi, b, &mut self.stats.inferences),
            Step::Propagated => Ok(()),
        };
        if result.is_err() {
            self.stats.conflicts += 1;
            return None;
        }
        if chi.iter().all(|s| s.is_known()) {
            let extends = chi
                .iter()
                .zip(&self.search.initial.chi)
                .all(|(c, i)| !i.is_known() || c == i);
            if extends && prop.validate(&chi) {
                self.found
                    .push(chi.iter().map(|s| s.known().expect("complete")).collect());
                if !self.search.config.collect_all {
                    self.stopped = true;
                }
            } else {
                self.stats.conflicts += 1;
            }
            return None;
        }
        Some(chi)
    }

    fn node(&mut self, chi: Vec<TriSign>, step: Step) {
        let Some(chi) = self.settle(chi, step) else {
            return;
        };
        let b = self.search.choose(&chi);
        for s in [Sign::Plus, Sign::Minus] {
            if self.stopped {
                return;
            }
            let mut child = chi.clone();
            child[b] = s.into();
            self.node(child, Step::Assigned(b));
        }
    }

    fn finish(mut self) -> CompletionSet {
        self.found.sort();
        CompletionSet {
            pattern: self.search.pattern.clone(),
            config: self.search.config,
            completions: self.found,
            stats: self.stats,
            truncated: self.truncated,
        }
    }
}
