use super::{boundary, RuleOutcome, TraceEntry};
use crate::error::Result;
use crate::graph::{Graph, VertexSet};

/// A vertex without neighbors belongs to every optimum.
pub fn reduce_isolated(g: &mut Graph, v: usize) -> Result<RuleOutcome> {
    g.check_alive(v)?;
    if g.degree(v) != 0 {
        return Ok(RuleOutcome::not_applied());
    }
    let offset = g.weight(v);
    g.remove_vertex(v)?;
    Ok(RuleOutcome::applied(
        TraceEntry::Include {
            vertices: VertexSet::singleton(v),
            offset,
        },
        VertexSet::new(),
    ))
}

/// Degree-one vertex `v` with neighbor `u`.
///
/// With `w_v >= w_u` the pendant is taken and both vertices go. Otherwise
/// `v` is removed and `u` keeps `w_u - w_v`: the kernel choosing `u` means
/// `u` in the original, not choosing it means `v`.
pub fn reduce_pendant(g: &mut Graph, v: usize) -> Result<RuleOutcome> {
    g.check_alive(v)?;
    if g.degree(v) != 1 {
        return Ok(RuleOutcome::not_applied());
    }
    let u = g.adjacent(v)[0];
    let (wv, wu) = (g.weight(v), g.weight(u));
    if wv >= wu {
        let removed = VertexSet::from([u, v]);
        let touched = boundary(g, &removed);
        g.remove_vertices(&removed)?;
        Ok(RuleOutcome::applied(
            TraceEntry::Include {
                vertices: VertexSet::singleton(v),
                offset: wv,
            },
            touched,
        ))
    } else {
        g.set_weight(u, wu - wv);
        g.remove_vertex(v)?;
        Ok(RuleOutcome::applied(
            TraceEntry::WeightTransfer {
                vertex: v,
                neighbors: VertexSet::singleton(u),
                offset: wv,
            },
            VertexSet::singleton(u),
        ))
    }
}

/// Vertex whose neighborhood is a clique.
///
/// * `w_v >= max w(N(v))`: take `v`, drop `N[v]`.
/// * Otherwise, if some neighbor `u` with `w_u >= w_v` has `N[u] = N[v]`,
///   `u` can always replace `v`, so `v` is dropped with no offset.
/// * Otherwise `w_v` is transferred: `v` goes, neighbors no heavier than `v`
///   go, the rest lose `w_v`, and `w_v` is added to the offset. `v` is
///   restored iff no surviving neighbor ends up in the solution.
pub fn reduce_simplicial(g: &mut Graph, v: usize) -> Result<RuleOutcome> {
    g.check_alive(v)?;
    let nb = g.adjacent(v).to_vec();
    if !g.is_clique(&nb) {
        return Ok(RuleOutcome::not_applied());
    }
    let wv = g.weight(v);
    let heaviest = nb.iter().map(|&u| g.weight(u)).max().unwrap_or(0);

    if wv >= heaviest {
        let mut removed: VertexSet = nb.into();
        removed.insert(v);
        let touched = boundary(g, &removed);
        g.remove_vertices(&removed)?;
        return Ok(RuleOutcome::applied(
            TraceEntry::Include {
                vertices: VertexSet::singleton(v),
                offset: wv,
            },
            touched,
        ));
    }

    // u ~ v and u ~ N(v) \ {u}, so N[u] contains N[v]; equality is a degree test.
    let substitute = nb
        .iter()
        .any(|&u| g.weight(u) >= wv && g.degree(u) == nb.len());
    if substitute {
        g.remove_vertex(v)?;
        return Ok(RuleOutcome::applied(
            TraceEntry::Exclude { vertex: v },
            nb.into(),
        ));
    }

    let (light, heavy): (Vec<usize>, Vec<usize>) = nb.iter().partition(|&&u| g.weight(u) <= wv);
    let mut removed: VertexSet = light.into();
    removed.insert(v);
    let mut touched = boundary(g, &removed);
    for &u in &heavy {
        g.set_weight(u, g.weight(u) - wv);
        touched.insert(u);
    }
    g.remove_vertices(&removed)?;
    Ok(RuleOutcome::applied(
        TraceEntry::WeightTransfer {
            vertex: v,
            neighbors: heavy.into(),
            offset: wv,
        },
        touched,
    ))
}
