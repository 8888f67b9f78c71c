//! Vertex-weighted undirected graph with tombstoned deletion.
//!
//! Vertex ids are stable for the lifetime of a [`Graph`]: removed vertices are
//! marked dead rather than compacted, and vertices created by folds receive
//! fresh ids past the end of the allocated range. [`Graph::compact`] produces
//! a dense copy for export.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Returns `true` if `v` was not already present.
    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    /// Returns `true` if `v` was present.
    pub fn remove(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[usize; N]> for VertexSet {
    fn from(v: [usize; N]) -> Self {
        v.into_iter().collect()
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = std::vec::IntoIter<usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Grid position of a vertex in lattice units.
pub type Coord = (i64, i64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    alive: Vec<bool>,
    weight: Vec<u64>,
    // Sorted adjacency lists; dead vertices have empty lists.
    adj: Vec<Vec<usize>>,
    coords: Vec<Option<Coord>>,
    num_alive: usize,
    num_edges: usize,
}

impl Graph {
    /// `n` isolated vertices of weight 1.
    pub fn new(n: usize) -> Self {
        Self::with_weights(vec![1; n])
    }

    pub fn with_weights(weights: Vec<u64>) -> Self {
        let n = weights.len();
        Self {
            alive: vec![true; n],
            weight: weights,
            adj: vec![Vec::new(); n],
            coords: vec![None; n],
            num_alive: n,
            num_edges: 0,
        }
    }

    pub fn from_edges(weights: Vec<u64>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::with_weights(weights);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Total number of ids ever allocated; also the next fresh id.
    pub fn num_allocated(&self) -> usize {
        self.adj.len()
    }

    pub fn num_alive(&self) -> usize {
        self.num_alive
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_alive(&self, v: usize) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn check_alive(&self, v: usize) -> Result<()> {
        if v >= self.alive.len() {
            Err(Error::OutOfRange(v))
        } else if !self.alive[v] {
            Err(Error::DeadVertex(v))
        } else {
            Ok(())
        }
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weight[v]
    }

    pub fn set_weight(&mut self, v: usize, w: u64) {
        self.weight[v] = w;
    }

    pub fn weights(&self) -> &[u64] {
        &self.weight
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Borrowed sorted open neighborhood. Empty for dead vertices.
    pub fn adjacent(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn coord(&self, v: usize) -> Option<Coord> {
        self.coords[v]
    }

    pub fn set_coord(&mut self, v: usize, c: Option<Coord>) {
        self.coords[v] = c;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn alive_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(v, _)| v)
    }

    /// Alive edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn max_weight(&self) -> u64 {
        self.alive_vertices()
            .map(|v| self.weight[v])
            .max()
            .unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Adds edge `{u, v}`; a no-op if already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_alive(u)?;
        self.check_alive(v)?;
        if u == v {
            return Err(Error::Malformed(format!("self-loop at vertex {u}")));
        }
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
            let pos = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(pos, u);
            self.num_edges += 1;
        }
        Ok(())
    }

    pub fn neighbors(&self, v: usize) -> Result<VertexSet> {
        self.check_alive(v)?;
        Ok(VertexSet(self.adj[v].clone()))
    }

    pub fn closed_neighborhood(&self, v: usize) -> Result<VertexSet> {
        let mut n = self.neighbors(v)?;
        n.insert(v);
        Ok(n)
    }

    /// Union of open neighborhoods of `set`, minus `set` itself.
    pub fn set_neighborhood(&self, set: &[usize]) -> VertexSet {
        let mut out: VertexSet = set
            .iter()
            .flat_map(|&v| self.adj[v].iter().copied())
            .collect();
        for &v in set {
            out.remove(v);
        }
        out
    }

    /// `true` iff the given alive vertices are pairwise adjacent.
    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &a)| vs[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    fn first_internal_edge(&self, vs: &[usize]) -> Option<(usize, usize)> {
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                if self.has_edge(a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `true` iff the given alive vertices are pairwise non-adjacent.
    pub fn is_independent_slice(&self, vs: &[usize]) -> bool {
        self.first_internal_edge(vs).is_none()
    }

    pub fn is_independent(&self, s: &VertexSet) -> Result<bool> {
        for v in s {
            self.check_alive(v)?;
        }
        Ok(self.is_independent_slice(s.as_slice()))
    }

    pub fn solution_weight(&self, s: &VertexSet) -> Result<u64> {
        for v in s {
            self.check_alive(v)?;
        }
        if let Some((a, b)) = self.first_internal_edge(s.as_slice()) {
            return Err(Error::NotIndependent(a, b));
        }
        Ok(s.iter().map(|v| self.weight[v]).sum())
    }

    /// QUBO-style cost `-sum_{i in x} w_i + U * |{edges inside x}|`.
    pub fn evaluate_cost(&self, x: &VertexSet, penalty: u64) -> Result<i64> {
        let max_weight = self.max_weight();
        if penalty <= max_weight {
            return Err(Error::PenaltyTooSmall {
                penalty,
                max_weight,
            });
        }
        for v in x {
            self.check_alive(v)?;
        }
        let reward: i64 = x.iter().map(|v| self.weight[v] as i64).sum();
        let conflicts = x
            .iter()
            .map(|u| {
                self.adj[u]
                    .iter()
                    .filter(|&&v| v > u && x.contains(v))
                    .count()
            })
            .sum::<usize>() as i64;
        Ok(-reward + penalty as i64 * conflicts)
    }

    /// Smallest legal penalty for [`Graph::evaluate_cost`].
    pub fn default_penalty(&self) -> u64 {
        self.max_weight() + 1
    }

    pub fn remove_vertex(&mut self, v: usize) -> Result<()> {
        self.check_alive(v)?;
        let nb = std::mem::take(&mut self.adj[v]);
        for &u in &nb {
            let list = &mut self.adj[u];
            if let Ok(pos) = list.binary_search(&v) {
                list.remove(pos);
            }
        }
        self.num_edges -= nb.len();
        self.alive[v] = false;
        self.num_alive -= 1;
        Ok(())
    }

    pub fn remove_vertices(&mut self, s: &VertexSet) -> Result<()> {
        for v in s {
            self.check_alive(v)?;
        }
        for v in s {
            self.remove_vertex(v)?;
        }
        Ok(())
    }

    /// Creates a fresh alive vertex adjacent to `neighbors` and returns its id.
    pub fn add_fold_vertex(&mut self, weight: u64, neighbors: &VertexSet) -> Result<usize> {
        for u in neighbors {
            self.check_alive(u)?;
        }
        let id = self.adj.len();
        self.alive.push(true);
        self.weight.push(weight);
        self.coords.push(None);
        self.adj.push(neighbors.as_slice().to_vec());
        // `id` exceeds every existing id, so appending keeps lists sorted.
        for u in neighbors {
            self.adj[u].push(id);
        }
        self.num_alive += 1;
        self.num_edges += neighbors.len();
        Ok(id)
    }

    /// Full structural audit: symmetry, no self-loops, sortedness, no dead
    /// endpoints, and cached counters.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let mut edges = 0;
        let mut alive = 0;
        for v in 0..self.adj.len() {
            if self.alive[v] {
                alive += 1;
            } else if !self.adj[v].is_empty() {
                return Err(format!("dead vertex {v} has incident edges"));
            }
            let list = &self.adj[v];
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("adjacency of {v} is not strictly sorted"));
            }
            for &u in list {
                if u == v {
                    return Err(format!("self-loop at {v}"));
                }
                if !self.alive[u] {
                    return Err(format!("edge ({v}, {u}) touches a dead vertex"));
                }
                if self.adj[u].binary_search(&v).is_err() {
                    return Err(format!("edge ({v}, {u}) is not symmetric"));
                }
            }
            edges += list.len();
        }
        if edges % 2 != 0 || edges / 2 != self.num_edges {
            return Err(format!(
                "edge counter {} disagrees with adjacency",
                self.num_edges
            ));
        }
        if alive != self.num_alive {
            return Err(format!(
                "alive counter {} disagrees with flags",
                self.num_alive
            ));
        }
        Ok(())
    }

    /// Dense copy containing only alive vertices, plus the map from new index
    /// to old id.
    pub fn compact(&self) -> (Graph, Vec<usize>) {
        let ids: Vec<usize> = self.alive_vertices().collect();
        let mut index = vec![usize::MAX; self.adj.len()];
        for (i, &v) in ids.iter().enumerate() {
            index[v] = i;
        }
        let n = ids.len();
        let g = Graph {
            alive: vec![true; n],
            weight: ids.iter().map(|&v| self.weight[v]).collect(),
            adj: ids
                .iter()
                .map(|&v| self.adj[v].iter().map(|&u| index[u]).collect())
                .collect(),
            coords: ids.iter().map(|&v| self.coords[v]).collect(),
            num_alive: n,
            num_edges: self.num_edges,
        };
        // Relabelling is monotone, so lists stay sorted.
        debug_assert!(g.audit().is_ok());
        (g, ids)
    }

    /// Induced subgraph on `vs` (alive ids), compacted in the order given.
    pub fn induced(&self, vs: &[usize]) -> Graph {
        let mut g = Graph::with_weights(vs.iter().map(|&v| self.weight[v]).collect());
        for (i, &a) in vs.iter().enumerate() {
            for (j, &b) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j).expect("fresh vertices are alive");
                }
            }
        }
        g
    }
}
