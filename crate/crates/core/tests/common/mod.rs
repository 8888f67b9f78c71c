//! Brute-force oracles and random instance families shared by the
//! integration tests.

#![allow(dead_code)]

use rydberg_mwis::rng::{rng_from_seed, uniform_below, Rng};
use rydberg_mwis::{Graph, VertexSet};

/// Maximum-weight independent set by enumerating every subset of the alive
/// vertices. Ties go to the first subset in mask order.
pub fn brute_mwis(g: &Graph) -> (u64, VertexSet) {
    let ids: Vec<usize> = g.alive_vertices().collect();
    let n = ids.len();
    assert!(n <= 24, "brute force on {n} vertices");
    let adj: Vec<u32> = ids
        .iter()
        .map(|&a| {
            ids.iter()
                .enumerate()
                .filter(|&(_, &b)| g.has_edge(a, b))
                .fold(0u32, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let size = 1usize << n;
    let mut ok = vec![true; size];
    let mut weight = vec![0u64; size];
    let (mut best, mut best_mask) = (0u64, 0usize);
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        ok[mask] = ok[rest] && adj[low] & rest as u32 == 0;
        if ok[mask] {
            weight[mask] = weight[rest] + g.weight(ids[low]);
            if weight[mask] > best {
                best = weight[mask];
                best_mask = mask;
            }
        }
    }
    let set = (0..n)
        .filter(|&i| best_mask >> i & 1 == 1)
        .map(|i| ids[i])
        .collect();
    (best, set)
}

/// Independence and weight checked edge by edge, without library helpers.
pub fn check_independent(g: &Graph, s: &VertexSet) -> Result<u64, String> {
    let vs = s.as_slice();
    for (i, &a) in vs.iter().enumerate() {
        if !g.is_alive(a) {
            return Err(format!("vertex {a} is not in the graph"));
        }
        for &b in &vs[i + 1..] {
            if g.has_edge(a, b) {
                return Err(format!("edge ({a}, {b}) inside the set"));
            }
        }
    }
    Ok(vs.iter().map(|&v| g.weight(v)).sum())
}

pub fn rng(seed: u64) -> Rng {
    rng_from_seed(seed)
}

pub fn below(rng: &mut Rng, bound: u64) -> u64 {
    uniform_below(rng, bound)
}

pub fn random_weights(rng: &mut Rng, n: usize, wmax: u64) -> Vec<u64> {
    (0..n).map(|_| 1 + below(rng, wmax)).collect()
}

/// `G(n, p)` random graph with edge probability `p_percent / 100`.
pub fn random_graph(rng: &mut Rng, n: usize, p_percent: u64, wmax: u64) -> Graph {
    let mut g = Graph::with_weights(random_weights(rng, n, wmax));
    for u in 0..n {
        for v in u + 1..n {
            if below(rng, 100) < p_percent {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Random graph in which vertices 0 and 1 are twins over the independent
/// triple {2, 3, 4}; the remaining vertices are wired at random.
pub fn planted_twins(rng: &mut Rng, n: usize, p_percent: u64, wmax: u64) -> Graph {
    assert!(n >= 5);
    let mut g = Graph::with_weights(random_weights(rng, n, wmax));
    for t in [0, 1] {
        for x in 2..5 {
            g.add_edge(t, x).unwrap();
        }
    }
    for u in 2..n {
        for v in (u + 1).max(5)..n {
            if below(rng, 100) < p_percent {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// A mix of sparse, medium and dense random graphs on `lo..=hi` vertices.
pub fn mixed_graph(rng: &mut Rng, lo: usize, hi: usize) -> Graph {
    let n = lo + below(rng, (hi - lo + 1) as u64) as usize;
    let p = [10, 20, 30, 45, 60][below(rng, 5) as usize];
    let wmax = [1, 1, 3, 10, 100][below(rng, 5) as usize];
    match below(rng, 6) {
        0 if n >= 5 => planted_twins(rng, n, p, wmax),
        _ => random_graph(rng, n, p, wmax),
    }
}

/// Applies `rule` at the first vertex where it fires and checks the step
/// against brute force: `mwis(G) = mwis(G') + offset`, and an optimum of `G'`
/// lifted through the step is an optimum of `G`. Returns whether the rule
/// fired; a rule that does not fire must leave the graph untouched.
pub fn check_rule_step(g: &Graph, rule: rydberg_mwis::Rule, cap: usize) -> Result<bool, String> {
    for v in g.alive_vertices() {
        let mut h = g.clone();
        let out = rydberg_mwis::reductions::apply_rule(&mut h, rule, v, cap)
            .map_err(|e| e.to_string())?;
        if !out.applied {
            if &h != g {
                return Err(format!("{rule} at {v} changed the graph without firing"));
            }
            continue;
        }
        h.audit().map_err(|e| format!("{rule} at {v}: {e}"))?;
        let entry = out.entry.ok_or("applied without a trace entry")?;
        let (before, _) = brute_mwis(g);
        let (after, mut sol) = brute_mwis(&h);
        if before != after + entry.offset_delta() {
            return Err(format!(
                "{rule} at {v}: mwis {before} != {after} + {} on {:?} weights {:?}",
                entry.offset_delta(),
                g.edges().collect::<Vec<_>>(),
                g.weights()
            ));
        }
        entry.undo(&mut sol);
        let lifted =
            check_independent(g, &sol).map_err(|e| format!("{rule} at {v}: lifted set: {e}"))?;
        if lifted != before {
            return Err(format!("{rule} at {v}: lifted weight {lifted} != {before}"));
        }
        return Ok(true);
    }
    Ok(false)
}
