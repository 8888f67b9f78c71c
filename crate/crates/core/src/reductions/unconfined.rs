//! Unconfined-vertex removal.
//!
//! Starting from `S = {v}`, a vertex `x` in `N(S)` is a child when
//! `w_x >= w(S ∩ N(x))`. Writing `slack = w_x - w(S ∩ N(x))` and
//! `R = N(x) \ N[S]`:
//!
//! * `mwis(R) <= slack` for some child means `v` is unconfined: some optimum
//!   avoids `v`, so it can be deleted.
//! * `y` in `R` with `mwis(R \ {y}) <= slack` is a satellite; if every optimum
//!   contained `v`, it would contain every satellite too, so `S` grows by the
//!   satellites of all children and the check repeats. Adjacent satellites
//!   are a contradiction, which again makes `v` unconfined.
//! * A round with no satellites means `S` confines `v`.
//!
//! The inner MWIS instances are solved exactly. When one exceeds the
//! subproblem cap the rule gives up on `v`, which is always safe.

use super::{RuleOutcome, TraceEntry};
use crate::error::Result;
use crate::graph::{Graph, VertexSet};
use crate::solver::{small_mwis, solve_branch_and_bound, SolveBudget};

pub const DEFAULT_SUBPROBLEM_CAP: usize = 16;

enum Verdict {
    Unconfined,
    Confined,
    Abstain,
}

pub fn reduce_unconfined(g: &mut Graph, v: usize, subproblem_cap: usize) -> Result<RuleOutcome> {
    g.check_alive(v)?;
    match confinement(g, v, subproblem_cap) {
        Verdict::Unconfined => {
            let touched: VertexSet = g.adjacent(v).iter().copied().collect();
            g.remove_vertex(v)?;
            Ok(RuleOutcome::applied(
                TraceEntry::Exclude { vertex: v },
                touched,
            ))
        }
        Verdict::Confined | Verdict::Abstain => Ok(RuleOutcome::not_applied()),
    }
}

fn confinement(g: &Graph, v: usize, cap: usize) -> Verdict {
    let mut s = VertexSet::singleton(v);
    loop {
        let ns = g.set_neighborhood(s.as_slice());
        let mut satellites = VertexSet::new();
        for x in &ns {
            let in_s: u64 = g
                .adjacent(x)
                .iter()
                .filter(|&&y| s.contains(y))
                .map(|&y| g.weight(y))
                .sum();
            let wx = g.weight(x);
            if wx < in_s {
                continue;
            }
            let slack = wx - in_s;
            let rest: Vec<usize> = g
                .adjacent(x)
                .iter()
                .copied()
                .filter(|&y| !s.contains(y) && !ns.contains(y))
                .collect();
            if rest.is_empty() {
                return Verdict::Unconfined;
            }
            // Any independent set of R, minus at most its heaviest member,
            // lower-bounds mwis(R \ {y}) for every y. Above the slack the
            // child can neither unconfine v nor produce satellites.
            let (greedy_weight, greedy_max) = greedy_bound(g, &rest);
            if greedy_weight - greedy_max > slack {
                continue;
            }
            if rest.len() > cap {
                return Verdict::Abstain;
            }
            let (best, members) = exact_mwis(g, &rest, None);
            if best <= slack {
                return Verdict::Unconfined;
            }
            // Satellites must lie in every optimum of R, so only members of
            // one optimum heavy enough to matter are candidates.
            for y in members {
                if g.weight(y) + slack < best {
                    continue;
                }
                if exact_mwis(g, &rest, Some(y)).0 <= slack {
                    satellites.insert(y);
                }
            }
        }
        if satellites.is_empty() {
            return Verdict::Confined;
        }
        if !g.is_independent_slice(satellites.as_slice()) {
            return Verdict::Unconfined;
        }
        s = s.union(&satellites);
    }
}

/// Greedy independent set by descending weight; returns its weight and its
/// heaviest member's weight.
fn greedy_bound(g: &Graph, vs: &[usize]) -> (u64, u64) {
    let mut order = vs.to_vec();
    order.sort_by_key(|&y| (std::cmp::Reverse(g.weight(y)), y));
    let mut picked: Vec<usize> = Vec::new();
    for y in order {
        if picked.iter().all(|&p| !g.has_edge(p, y)) {
            picked.push(y);
        }
    }
    let total = picked.iter().map(|&p| g.weight(p)).sum();
    let max = picked.iter().map(|&p| g.weight(p)).max().unwrap_or(0);
    (total, max)
}

/// Exact MWIS of `G[vs \ {skip}]`: its weight and one optimal member list.
fn exact_mwis(g: &Graph, vs: &[usize], skip: Option<usize>) -> (u64, Vec<usize>) {
    let ids: Vec<usize> = vs.iter().copied().filter(|&y| Some(y) != skip).collect();
    if ids.len() <= 64 {
        let mut adj = vec![0u64; ids.len()];
        for (i, &a) in ids.iter().enumerate() {
            for (j, &b) in ids.iter().enumerate().skip(i + 1) {
                if g.has_edge(a, b) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let w: Vec<u64> = ids.iter().map(|&y| g.weight(y)).collect();
        let (best, mask) = small_mwis(&adj, &w);
        let members = (0..ids.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| ids[i])
            .collect();
        (best, members)
    } else {
        let sub = g.induced(&ids);
        let budget = SolveBudget {
            max_nodes_bnb: u64::MAX,
            ..SolveBudget::default()
        };
        let out = solve_branch_and_bound(&sub, &budget);
        (
            out.solution.weight,
            out.solution.vertices.iter().map(|i| ids[i]).collect(),
        )
    }
}
