use super::{RuleOutcome, TraceEntry};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Vertex folding.
///
/// With `N(v)` independent, `w(N(v)) > w_v` and
/// `w(N(v)) - min_{u in N(v)} w_u < w_v`, every optimum takes either `v` or all
/// of `N(v)`. The closed neighborhood is replaced by a fresh vertex of weight
/// `w(N(v)) - w_v` adjacent to `N(N(v)) \ N[v]`.
///
/// The classic unweighted fold (degree two, non-adjacent neighbors, all three
/// weights equal) sits exactly on the boundary of the strict inequality and
/// is accepted separately.
pub fn reduce_fold(g: &mut Graph, v: usize) -> Result<RuleOutcome> {
    g.check_alive(v)?;
    let nb = g.adjacent(v).to_vec();
    if nb.is_empty() || !g.is_independent_slice(&nb) {
        return Ok(RuleOutcome::not_applied());
    }
    let wv = g.weight(v);
    let total: u64 = nb.iter().map(|&u| g.weight(u)).sum();
    let lightest = nb.iter().map(|&u| g.weight(u)).min().unwrap_or(0);
    let weighted = total > wv && total - lightest < wv;
    let unweighted = nb.len() == 2 && nb.iter().all(|&u| g.weight(u) == wv);
    if !(weighted || unweighted) {
        return Ok(RuleOutcome::not_applied());
    }

    let mut outer = g.set_neighborhood(&nb);
    outer.remove(v);
    let mut removed: VertexSet = nb.iter().copied().collect();
    removed.insert(v);
    g.remove_vertices(&removed)?;
    let fold_new = g.add_fold_vertex(total - wv, &outer)?;
    let mut touched = outer;
    touched.insert(fold_new);
    Ok(RuleOutcome::applied(
        TraceEntry::FoldVertex {
            fold_new,
            center: v,
            neighbors: nb.into(),
            offset: wv,
        },
        touched,
    ))
}

/// Smallest-id twin of `v`: a vertex with the same three independent
/// neighbors. Non-adjacency follows from the neighborhoods being equal.
pub fn find_twin(g: &Graph, v: usize) -> Result<Option<usize>> {
    g.check_alive(v)?;
    let nb = g.adjacent(v);
    if nb.len() != 3 || !g.is_independent_slice(nb) {
        return Ok(None);
    }
    Ok(g.adjacent(nb[0])
        .iter()
        .copied()
        .find(|&x| x != v && g.adjacent(x) == nb))
}

/// Twin reduction for non-adjacent `u`, `v` with `N(u) = N(v) = {p, q, r}`
/// independent. With `A = w_u + w_v`, `B = w_p + w_q + w_r`:
/// `A >= B` takes both twins; `B - min(w_p, w_q, w_r) < A < B` folds all five
/// vertices into one of weight `B - A`.
pub fn reduce_twin(g: &mut Graph, u: usize, v: usize) -> Result<RuleOutcome> {
    g.check_alive(u)?;
    g.check_alive(v)?;
    if u == v {
        return Err(Error::Malformed(format!(
            "twin pair ({u}, {v}) repeats a vertex"
        )));
    }
    let nb = g.adjacent(v).to_vec();
    if nb.len() != 3 || g.adjacent(u) != nb.as_slice() || !g.is_independent_slice(&nb) {
        return Ok(RuleOutcome::not_applied());
    }
    let a = g.weight(u) + g.weight(v);
    let b: u64 = nb.iter().map(|&x| g.weight(x)).sum();
    let lightest = nb.iter().map(|&x| g.weight(x)).min().unwrap_or(0);
    let pair = VertexSet::from([u, v]);
    let mut removed: VertexSet = nb.iter().copied().collect();
    removed.insert(u);
    removed.insert(v);
    let mut outer = g.set_neighborhood(&nb);
    outer.remove(u);
    outer.remove(v);

    if a >= b {
        g.remove_vertices(&removed)?;
        return Ok(RuleOutcome::applied(
            TraceEntry::Include {
                vertices: pair,
                offset: a,
            },
            outer,
        ));
    }
    if a + lightest <= b {
        return Ok(RuleOutcome::not_applied());
    }
    g.remove_vertices(&removed)?;
    let fold_new = g.add_fold_vertex(b - a, &outer)?;
    let mut touched = outer;
    touched.insert(fold_new);
    Ok(RuleOutcome::applied(
        TraceEntry::FoldTwin {
            fold_new,
            pair,
            neighbors: nb.into(),
            offset: a,
        },
        touched,
    ))
}
