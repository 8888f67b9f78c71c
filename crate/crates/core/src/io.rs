//! JSON interchange formats for graphs and kernelization results.
//!
//! ```json
//! {"n": 3, "weights": [1, 1, 1], "edges": [[0, 1], [1, 2]],
//!  "coords": [[0, 0], [0, 1], [0, 2]], "meta": {}}
//! ```
//!
//! Edges are listed once with `u < v`. `coords` is omitted when any exported
//! vertex lacks a position (fold vertices have none).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::kernel::{lift_solution, KernelResult};
use crate::reductions::{Rule, TraceEntry};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub weights: Vec<u64>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[i64; 2]>>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl GraphJson {
    /// Exports the alive part of `g`, relabelled densely in id order.
    pub fn from_graph(g: &Graph, meta: Map<String, Value>) -> Self {
        let (k, _) = g.compact();
        let n = k.num_alive();
        let coords: Option<Vec<[i64; 2]>> =
            (0..n).map(|v| k.coord(v).map(|(x, y)| [x, y])).collect();
        GraphJson {
            n,
            weights: k.weights().to_vec(),
            edges: k.edges().map(|(u, v)| [u, v]).collect(),
            coords: if n == 0 { None } else { coords },
            meta,
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        if self.weights.len() != self.n {
            return Err(Error::Malformed(format!(
                "{} weights for {} vertices",
                self.weights.len(),
                self.n
            )));
        }
        let mut g = Graph::with_weights(self.weights.clone());
        for &[u, v] in &self.edges {
            if u >= self.n || v >= self.n {
                return Err(Error::Malformed(format!("edge ({u}, {v}) out of range")));
            }
            g.add_edge(u, v)?;
        }
        if let Some(coords) = &self.coords {
            if coords.len() != self.n {
                return Err(Error::Malformed(format!(
                    "{} coordinates for {} vertices",
                    coords.len(),
                    self.n
                )));
            }
            for (v, &[x, y]) in coords.iter().enumerate() {
                g.set_coord(v, Some((x, y)));
            }
        }
        Ok(g)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Writes compact JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<(Graph, Map<String, Value>)> {
    let doc: GraphJson = read_json(path)?;
    let g = doc.to_graph()?;
    Ok((g, doc.meta))
}

/// On-disk form of a [`KernelResult`]. `kernel_ids[i]` is the working-graph
/// id of kernel vertex `i`; trace entries use working-graph ids, where the
/// input's vertices keep their positions and fold vertices follow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelJson {
    pub kernel: GraphJson,
    pub kernel_ids: Vec<usize>,
    pub offset: u64,
    pub xi: f64,
    #[serde(rename = "n_G")]
    pub n_g: usize,
    #[serde(rename = "m_G")]
    pub m_g: usize,
    #[serde(rename = "n_K")]
    pub n_k: usize,
    #[serde(rename = "m_K")]
    pub m_k: usize,
    pub rule_counts: BTreeMap<Rule, u64>,
    pub trace: Vec<TraceEntry>,
}

impl KernelJson {
    pub fn from_result(r: &KernelResult, meta: Map<String, Value>) -> Self {
        KernelJson {
            kernel: GraphJson::from_graph(&r.kernel, meta),
            kernel_ids: r.kernel_ids.clone(),
            offset: r.offset,
            xi: r.xi,
            n_g: r.n_g,
            m_g: r.m_g,
            n_k: r.n_k,
            m_k: r.m_k,
            rule_counts: r.rule_counts.clone(),
            trace: r.trace.clone(),
        }
    }

    /// Lifts an independent set given in kernel ids to the original graph.
    pub fn lift(&self, kernel_solution: &VertexSet) -> Result<VertexSet> {
        let working = kernel_solution
            .iter()
            .map(|i| self.kernel_ids.get(i).copied().ok_or(Error::OutOfRange(i)))
            .collect::<Result<VertexSet>>()?;
        Ok(lift_solution(&self.trace, working))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn export_skips_dead_vertices_and_lists_edges_once() {
        let mut g = Graph::from_edges(vec![1, 2, 3, 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        for v in 0..4 {
            g.set_coord(v, Some((v as i64, 0)));
        }
        g.remove_vertex(0).unwrap();
        let doc = GraphJson::from_graph(&g, Map::new());
        assert_eq!(doc.n, 3);
        assert_eq!(doc.weights, vec![2, 3, 4]);
        assert_eq!(doc.edges, vec![[0, 1], [1, 2]]);
        assert_eq!(doc.coords, Some(vec![[1, 0], [2, 0], [3, 0]]));

        let back = doc.to_graph().unwrap();
        assert_eq!(back.num_edges(), 2);
        assert_eq!(back.coord(2), Some((3, 0)));
    }

    #[test]
    fn coords_dropped_when_fold_vertex_present() {
        let mut g = Graph::new(2);
        g.set_coord(0, Some((0, 0)));
        g.set_coord(1, Some((0, 1)));
        g.add_fold_vertex(1, &VertexSet::from([0])).unwrap();
        let doc = GraphJson::from_graph(&g, Map::new());
        assert!(doc.coords.is_none());
        let text = serde_json::to_string(&doc).unwrap();
        assert!(!text.contains("coords"));
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad: GraphJson = serde_json::from_str(r#"{"n":2,"weights":[1],"edges":[]}"#).unwrap();
        assert!(bad.to_graph().is_err());
        let bad: GraphJson =
            serde_json::from_str(r#"{"n":2,"weights":[1,1],"edges":[[0,2]]}"#).unwrap();
        assert!(bad.to_graph().is_err());
        let bad: GraphJson =
            serde_json::from_str(r#"{"n":2,"weights":[1,1],"edges":[[1,1]]}"#).unwrap();
        assert!(bad.to_graph().is_err());
    }
}
