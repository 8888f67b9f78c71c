//! Exact MWIS: exhaustive enumeration (the reference oracle) and a
//! branch-and-reduce search for larger kernels.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveBudget {
    pub max_vertices_exhaustive: usize,
    pub max_nodes_bnb: u64,
    pub time_limit: Option<Duration>,
}

impl Default for SolveBudget {
    fn default() -> Self {
        Self {
            max_vertices_exhaustive: 20,
            max_nodes_bnb: 10_000_000,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub vertices: VertexSet,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub solution: Solution,
    pub status: SolveStatus,
    pub nodes: u64,
}

/// Enumerates every independent set of `g` and returns the heaviest one.
/// Ties go to the lexicographically smallest sorted vertex list.
pub fn solve_exhaustive(g: &Graph, budget: &SolveBudget) -> Result<Solution> {
    let limit = budget.max_vertices_exhaustive.min(64);
    let ids: Vec<usize> = g.alive_vertices().collect();
    if ids.len() > limit {
        return Err(Error::TooLarge {
            vertices: ids.len(),
            limit,
        });
    }
    let (adj, weights) = dense_masks(g, &ids);
    let mut best = (0u64, 0u64);
    let all = if ids.len() == 64 {
        u64::MAX
    } else {
        (1u64 << ids.len()) - 1
    };
    enumerate(&adj, &weights, all, 0, 0, &mut best);
    let vertices: VertexSet = bits(best.1).map(|i| ids[i]).collect();
    debug_assert!(g.is_independent_slice(vertices.as_slice()));
    Ok(Solution {
        vertices,
        weight: best.0,
    })
}

// Preorder DFS over increasing vertex sequences visits independent sets in
// lexicographic order, so a strict improvement test keeps the smallest tie.
fn enumerate(adj: &[u64], w: &[u64], cand: u64, cur: u64, cur_w: u64, best: &mut (u64, u64)) {
    if cur_w > best.0 {
        *best = (cur_w, cur);
    }
    for b in bits(cand) {
        let above = if b == 63 { 0 } else { u64::MAX << (b + 1) };
        enumerate(
            adj,
            w,
            cand & above & !adj[b],
            cur | (1 << b),
            cur_w + w[b],
            best,
        );
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

fn dense_masks(g: &Graph, ids: &[usize]) -> (Vec<u64>, Vec<u64>) {
    let mut adj = vec![0u64; ids.len()];
    for (i, &a) in ids.iter().enumerate() {
        for (j, &b) in ids.iter().enumerate().skip(i + 1) {
            if g.has_edge(a, b) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    (adj, ids.iter().map(|&v| g.weight(v)).collect())
}

/// Weight of an MWIS of the subgraph induced by `vs` (at most 64 vertices).
pub fn mwis_weight_of(g: &Graph, vs: &[usize]) -> u64 {
    let (adj, w) = dense_masks(g, vs);
    small_mwis(&adj, &w).0
}

/// Small dense MWIS by branch and bound over a 64-bit candidate mask.
/// Returns `(weight, mask)`.
pub fn small_mwis(adj: &[u64], w: &[u64]) -> (u64, u64) {
    assert!(adj.len() <= 64);
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut best = (0, 0);
    small_rec(adj, w, all, 0, 0, &mut best);
    best
}

fn small_rec(adj: &[u64], w: &[u64], cand: u64, cur: u64, cur_w: u64, best: &mut (u64, u64)) {
    let rest: u64 = bits(cand).map(|b| w[b]).sum();
    if cur_w + rest <= best.0 {
        return;
    }
    let mut pick = None;
    let mut pick_deg = 0;
    for b in bits(cand) {
        let d = (adj[b] & cand).count_ones();
        if pick.is_none() || d > pick_deg {
            pick = Some(b);
            pick_deg = d;
        }
    }
    match pick {
        None => {
            if cur_w > best.0 {
                *best = (cur_w, cur);
            }
        }
        Some(_) if pick_deg == 0 => {
            if cur_w + rest > best.0 {
                *best = (cur_w + rest, cur | cand);
            }
        }
        Some(v) => {
            small_rec(
                adj,
                w,
                cand & !adj[v] & !(1 << v),
                cur | (1 << v),
                cur_w + w[v],
                best,
            );
            small_rec(adj, w, cand & !(1 << v), cur, cur_w, best);
        }
    }
}

/// Word-packed vertex set over the dense indices of the searched graph.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn subtract(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &w)| bits(w).map(move |b| k * 64 + b))
    }
}

struct Search<'a> {
    adj: Vec<Bits>,
    weights: Vec<u64>,
    reduce: bool,
    budget: &'a SolveBudget,
    start: Instant,
    nodes: u64,
    exceeded: bool,
    best_weight: u64,
    best: Vec<usize>,
    #[cfg(test)]
    visits: Vec<(Bits, u64, u64)>,
}

impl Search<'_> {
    fn out_of_budget(&mut self) -> bool {
        if !self.exceeded {
            let over_nodes = self.nodes > self.budget.max_nodes_bnb;
            let over_time = self.nodes.is_multiple_of(1024)
                && self
                    .budget
                    .time_limit
                    .is_some_and(|t| self.start.elapsed() > t);
            self.exceeded = over_nodes || over_time;
        }
        self.exceeded
    }

    fn take(&self, v: usize, cand: &mut Bits, chosen: &mut Vec<usize>, cur_w: &mut u64) {
        chosen.push(v);
        *cur_w += self.weights[v];
        cand.clear(v);
        cand.subtract(&self.adj[v]);
    }

    /// Include-only forms of the isolated, pendant and simplicial rules.
    fn reduce(&self, cand: &mut Bits, chosen: &mut Vec<usize>, cur_w: &mut u64) {
        loop {
            let mut changed = false;
            let members: Vec<usize> = cand.iter().collect();
            for v in members {
                if !cand.get(v) {
                    continue;
                }
                let nb: Vec<usize> = self.adj[v].iter().filter(|&u| cand.get(u)).collect();
                let dominant = nb.iter().all(|&u| self.weights[u] <= self.weights[v]);
                let clique = nb
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| nb[i + 1..].iter().all(|&b| self.adj[a].get(b)));
                if dominant && clique {
                    self.take(v, cand, chosen, cur_w);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn run(&mut self, mut cand: Bits, mut chosen: Vec<usize>, mut cur_w: u64) {
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        if self.reduce {
            self.reduce(&mut cand, &mut chosen, &mut cur_w);
        }
        let rest: u64 = cand.iter().map(|v| self.weights[v]).sum();
        #[cfg(test)]
        self.visits.push((cand.clone(), cur_w, cur_w + rest));
        if cur_w > self.best_weight {
            self.best_weight = cur_w;
            self.best = chosen.clone();
        }
        if cand.is_empty() || cur_w + rest <= self.best_weight {
            return;
        }
        let mut branch = None;
        let mut branch_deg = 0;
        for v in cand.iter() {
            let d = self.adj[v].and_count(&cand);
            if branch.is_none() || d > branch_deg {
                branch = Some(v);
                branch_deg = d;
            }
        }
        let v = branch.expect("candidate set is nonempty");
        if branch_deg == 0 {
            // Everything left is isolated.
            let mut all = chosen;
            all.extend(cand.iter());
            if cur_w + rest > self.best_weight {
                self.best_weight = cur_w + rest;
                self.best = all;
            }
            return;
        }
        {
            let mut c = cand.clone();
            let mut ch = chosen.clone();
            let mut w = cur_w;
            self.take(v, &mut c, &mut ch, &mut w);
            self.run(c, ch, w);
        }
        cand.clear(v);
        self.run(cand, chosen, cur_w);
    }
}

/// Branch and reduce on a maximum-degree vertex with the weight-sum bound.
pub fn solve_branch_and_bound(g: &Graph, budget: &SolveBudget) -> SearchOutcome {
    search(g, budget, true).0
}

/// Same search without the in-node reductions.
pub fn solve_branch_and_bound_plain(g: &Graph, budget: &SolveBudget) -> SearchOutcome {
    search(g, budget, false).0
}

fn search<'a>(g: &Graph, budget: &'a SolveBudget, reduce: bool) -> (SearchOutcome, Search<'a>) {
    let ids: Vec<usize> = g.alive_vertices().collect();
    let n = ids.len();
    let mut index = vec![usize::MAX; g.num_allocated()];
    for (i, &v) in ids.iter().enumerate() {
        index[v] = i;
    }
    let mut adj = vec![Bits::empty(n); n];
    for (i, &v) in ids.iter().enumerate() {
        for &u in g.adjacent(v) {
            adj[i].set(index[u]);
        }
    }
    let mut s = Search {
        adj,
        weights: ids.iter().map(|&v| g.weight(v)).collect(),
        reduce,
        budget,
        start: Instant::now(),
        nodes: 0,
        exceeded: false,
        best_weight: 0,
        best: Vec::new(),
        #[cfg(test)]
        visits: Vec::new(),
    };
    s.run(Bits::full(n), Vec::new(), 0);
    let vertices: VertexSet = s.best.iter().map(|&i| ids[i]).collect();
    assert!(
        g.is_independent_slice(vertices.as_slice()),
        "search returned a dependent set"
    );
    let outcome = SearchOutcome {
        solution: Solution {
            vertices,
            weight: s.best_weight,
        },
        status: if s.exceeded {
            SolveStatus::BudgetExceeded
        } else {
            SolveStatus::Optimal
        },
        nodes: s.nodes,
    };
    (outcome, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, uniform_below};

    fn random_graph(seed: u64, n: usize, p_percent: u64, w_max: u64) -> Graph {
        let mut rng = rng_from_seed(seed);
        let weights = (0..n).map(|_| 1 + uniform_below(&mut rng, w_max)).collect();
        let mut g = Graph::with_weights(weights);
        for u in 0..n {
            for v in u + 1..n {
                if uniform_below(&mut rng, 100) < p_percent {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    // Independent oracle: every subset, checked edge by edge.
    fn subsets_oracle(g: &Graph) -> u64 {
        let ids: Vec<usize> = g.alive_vertices().collect();
        let mut best = 0;
        for mask in 0u32..(1 << ids.len()) {
            let set: Vec<usize> = (0..ids.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ids[i])
                .collect();
            if g.is_independent_slice(&set) {
                best = best.max(set.iter().map(|&v| g.weight(v)).sum());
            }
        }
        best
    }

    fn grid3() -> Graph {
        let mut edges = vec![];
        for r in 0..3 {
            for c in 0..3 {
                let v = r * 3 + c;
                if c < 2 {
                    edges.push((v, v + 1));
                }
                if r < 2 {
                    edges.push((v, v + 3));
                }
            }
        }
        Graph::from_edges(vec![1; 9], &edges).unwrap()
    }

    #[test]
    fn exhaustive_examples() {
        let b = SolveBudget::default();
        let c4 = Graph::from_edges(vec![1; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = solve_exhaustive(&c4, &b).unwrap();
        assert_eq!(s.weight, 2);
        assert_eq!(s.vertices, VertexSet::from([0, 2]));

        let tri = Graph::from_edges(vec![1, 2, 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(solve_exhaustive(&tri, &b).unwrap().weight, 3);

        let s = solve_exhaustive(&grid3(), &b).unwrap();
        assert_eq!(s.weight, 5);
        assert_eq!(s.vertices, VertexSet::from([0, 2, 4, 6, 8]));
    }

    #[test]
    fn exhaustive_prefers_lexicographically_smallest_tie() {
        // Path 0-1-2-3: optima {0,2}, {0,3}, {1,3}.
        let p = Graph::from_edges(vec![1; 4], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = solve_exhaustive(&p, &SolveBudget::default()).unwrap();
        assert_eq!(s.vertices, VertexSet::from([0, 2]));
    }

    #[test]
    fn exhaustive_rejects_large_graphs() {
        let g = Graph::new(21);
        assert!(matches!(
            solve_exhaustive(&g, &SolveBudget::default()),
            Err(Error::TooLarge {
                vertices: 21,
                limit: 20
            })
        ));
    }

    #[test]
    fn exhaustive_matches_subset_oracle() {
        for seed in 0..200 {
            let g = random_graph(seed, 1 + (seed as usize % 12), 10 + seed % 60, 1 + seed % 7);
            let s = solve_exhaustive(&g, &SolveBudget::default()).unwrap();
            assert_eq!(s.weight, subsets_oracle(&g), "seed {seed}");
            assert_eq!(g.solution_weight(&s.vertices).unwrap(), s.weight);
        }
    }

    #[test]
    fn bnb_trivial_cases() {
        let b = SolveBudget::default();
        let out = solve_branch_and_bound(&Graph::new(0), &b);
        assert_eq!(out.solution.weight, 0);
        assert!(out.solution.vertices.is_empty());
        assert_eq!(out.status, SolveStatus::Optimal);

        let iso = Graph::with_weights(vec![3, 1, 4, 1, 5]);
        let out = solve_branch_and_bound(&iso, &b);
        assert_eq!(out.solution.weight, 14);
        assert_eq!(out.solution.vertices, VertexSet::from([0, 1, 2, 3, 4]));
    }

    #[test]
    fn bnb_matches_exhaustive_on_random_graphs() {
        let b = SolveBudget::default();
        for seed in 0..1200 {
            let n = 1 + (seed as usize * 7) % 20;
            let g = random_graph(
                1000 + seed,
                n,
                5 + (seed * 13) % 70,
                if seed % 2 == 0 { 1 } else { 10 },
            );
            let exact = solve_exhaustive(&g, &b).unwrap().weight;
            let reduced = solve_branch_and_bound(&g, &b);
            let plain = solve_branch_and_bound_plain(&g, &b);
            assert_eq!(reduced.status, SolveStatus::Optimal);
            assert_eq!(reduced.solution.weight, exact, "seed {seed}");
            assert_eq!(plain.solution.weight, exact, "seed {seed}");
            assert_eq!(
                g.solution_weight(&reduced.solution.vertices).unwrap(),
                exact
            );
            assert_eq!(g.solution_weight(&plain.solution.vertices).unwrap(), exact);
        }
    }

    #[test]
    fn bnb_handles_tombstoned_ids() {
        let mut g = random_graph(5, 15, 30, 9);
        g.remove_vertex(3).unwrap();
        g.remove_vertex(8).unwrap();
        let b = SolveBudget::default();
        let out = solve_branch_and_bound(&g, &b);
        assert_eq!(
            out.solution.weight,
            solve_exhaustive(&g, &b).unwrap().weight
        );
        assert!(!out.solution.vertices.contains(3) && !out.solution.vertices.contains(8));
    }

    #[test]
    fn node_bounds_dominate_best_completion() {
        let b = SolveBudget::default();
        for seed in 0..40 {
            let g = random_graph(77 + seed, 14, 30, 10);
            let (_, s) = search(&g, &b, true);
            let n = g.num_alive();
            for (cand, cur_w, bound) in s.visits.iter().take(200) {
                let members: Vec<usize> = (0..n).filter(|&i| cand.get(i)).collect();
                let completion = mwis_weight_of(&g, &members);
                assert!(bound >= &(cur_w + completion), "seed {seed}");
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let g = random_graph(3, 60, 10, 10);
        let b = SolveBudget {
            max_nodes_bnb: 5,
            ..SolveBudget::default()
        };
        let out = solve_branch_and_bound(&g, &b);
        assert_eq!(out.status, SolveStatus::BudgetExceeded);
        assert!(g.is_independent(&out.solution.vertices).unwrap());
    }

    #[test]
    fn small_solver_matches_exhaustive() {
        let b = SolveBudget::default();
        for seed in 0..300 {
            let g = random_graph(500 + seed, (seed as usize % 16) + 1, 40, 6);
            let ids: Vec<usize> = g.alive_vertices().collect();
            assert_eq!(
                mwis_weight_of(&g, &ids),
                solve_exhaustive(&g, &b).unwrap().weight
            );
        }
        assert_eq!(small_mwis(&[], &[]), (0, 0));
    }
}
