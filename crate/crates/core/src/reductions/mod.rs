//! Optimality-preserving reduction rules for MWIS.
//!
//! Every rule inspects one vertex (twins: one pair), and when it fires it
//! mutates the graph and returns a [`TraceEntry`] holding the weight committed
//! to the solution plus what is needed to lift a kernel solution back.
//! A rule that does not fire leaves the graph untouched.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

mod fold;
mod simple;
mod unconfined;

pub use fold::{find_twin, reduce_fold, reduce_twin};
pub use simple::{reduce_isolated, reduce_pendant, reduce_simplicial};
pub use unconfined::{reduce_unconfined, DEFAULT_SUBPROBLEM_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Isolated,
    Pendant,
    Simplicial,
    Fold,
    Twin,
    Unconfined,
}

impl Rule {
    /// Every rule, cheapest first.
    pub const ALL: [Rule; 6] = [
        Rule::Isolated,
        Rule::Pendant,
        Rule::Simplicial,
        Rule::Fold,
        Rule::Twin,
        Rule::Unconfined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Isolated => "isolated",
            Rule::Pendant => "pendant",
            Rule::Simplicial => "simplicial",
            Rule::Fold => "fold",
            Rule::Twin => "twin",
            Rule::Unconfined => "unconfined",
        }
    }

    /// Parses a comma-separated list. The result is deduplicated and sorted
    /// into the canonical cheapest-first order.
    pub fn parse_list(list: &str) -> Result<Vec<Rule>> {
        let mut rules = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Rule>>>()?;
        rules.sort();
        rules.dedup();
        Ok(rules)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// One reversible reduction step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEntry {
    /// `vertices` belong to the solution.
    Include { vertices: VertexSet, offset: u64 },
    /// `vertex` can be left out of the solution.
    Exclude { vertex: usize },
    /// `vertex` was removed after its weight was subtracted from the
    /// surviving `neighbors`; it joins the solution iff none of them does.
    WeightTransfer {
        vertex: usize,
        neighbors: VertexSet,
        offset: u64,
    },
    /// `center` and `neighbors` were replaced by `fold_new`.
    FoldVertex {
        fold_new: usize,
        center: usize,
        neighbors: VertexSet,
        offset: u64,
    },
    /// Twins `pair` and their common neighbors were replaced by `fold_new`.
    FoldTwin {
        fold_new: usize,
        pair: VertexSet,
        neighbors: VertexSet,
        offset: u64,
    },
}

impl TraceEntry {
    pub fn offset_delta(&self) -> u64 {
        match self {
            TraceEntry::Exclude { .. } => 0,
            TraceEntry::Include { offset, .. }
            | TraceEntry::WeightTransfer { offset, .. }
            | TraceEntry::FoldVertex { offset, .. }
            | TraceEntry::FoldTwin { offset, .. } => *offset,
        }
    }

    /// Rewrites a solution of the graph after this step into one of the
    /// graph before it.
    pub fn undo(&self, sol: &mut VertexSet) {
        match self {
            TraceEntry::Include { vertices, .. } => {
                for v in vertices {
                    sol.insert(v);
                }
            }
            TraceEntry::Exclude { .. } => {}
            TraceEntry::WeightTransfer {
                vertex, neighbors, ..
            } => {
                if !neighbors.iter().any(|u| sol.contains(u)) {
                    sol.insert(*vertex);
                }
            }
            TraceEntry::FoldVertex {
                fold_new,
                center,
                neighbors,
                ..
            } => {
                if sol.remove(*fold_new) {
                    for u in neighbors {
                        sol.insert(u);
                    }
                } else {
                    sol.insert(*center);
                }
            }
            TraceEntry::FoldTwin {
                fold_new,
                pair,
                neighbors,
                ..
            } => {
                let chosen = if sol.remove(*fold_new) {
                    neighbors
                } else {
                    pair
                };
                for u in chosen {
                    sol.insert(u);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleOutcome {
    pub applied: bool,
    pub entry: Option<TraceEntry>,
    /// Alive vertices whose neighborhood or weight changed.
    pub touched: VertexSet,
}

impl RuleOutcome {
    pub fn not_applied() -> Self {
        Self {
            applied: false,
            entry: None,
            touched: VertexSet::new(),
        }
    }

    fn applied(entry: TraceEntry, touched: VertexSet) -> Self {
        Self {
            applied: true,
            entry: Some(entry),
            touched,
        }
    }
}

/// Tries `rule` at `v`. For the twin rule the partner is looked up first.
pub fn apply_rule(
    g: &mut Graph,
    rule: Rule,
    v: usize,
    subproblem_cap: usize,
) -> Result<RuleOutcome> {
    match rule {
        Rule::Isolated => reduce_isolated(g, v),
        Rule::Pendant => reduce_pendant(g, v),
        Rule::Simplicial => reduce_simplicial(g, v),
        Rule::Fold => reduce_fold(g, v),
        Rule::Twin => match find_twin(g, v)? {
            Some(u) => reduce_twin(g, u, v),
            None => Ok(RuleOutcome::not_applied()),
        },
        Rule::Unconfined => reduce_unconfined(g, v, subproblem_cap),
    }
}

/// Alive vertices adjacent to `removed` but not in it.
fn boundary(g: &Graph, removed: &VertexSet) -> VertexSet {
    let mut out = g.set_neighborhood(removed.as_slice());
    for v in removed {
        out.remove(v);
    }
    out
}
