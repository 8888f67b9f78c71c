//! Exhaustive application of the reduction rules, and solution lifting.

use std::collections::{BTreeMap, VecDeque};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::reductions::{apply_rule, Rule, TraceEntry};

#[derive(Clone, Debug)]
pub struct KernelResult {
    /// Compacted kernel; vertex `i` is `kernel_ids[i]` in the working graph.
    pub kernel: Graph,
    pub kernel_ids: Vec<usize>,
    pub offset: u64,
    pub trace: Vec<TraceEntry>,
    pub n_g: usize,
    pub n_k: usize,
    pub m_g: usize,
    pub m_k: usize,
    pub xi: f64,
    pub rule_counts: BTreeMap<Rule, u64>,
}

impl KernelResult {
    pub fn fully_reduced(&self) -> bool {
        self.n_k == 0
    }

    pub fn count(&self, rule: Rule) -> u64 {
        self.rule_counts.get(&rule).copied().unwrap_or(0)
    }

    /// Lifts an independent set of the compacted kernel to the original graph.
    pub fn lift(&self, kernel_solution: &VertexSet) -> Result<VertexSet> {
        if !self.kernel.is_independent(kernel_solution)? {
            let s = kernel_solution.as_slice();
            let (a, b) = s
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| s[i + 1..].iter().map(move |&b| (a, b)))
                .find(|&(a, b)| self.kernel.has_edge(a, b))
                .expect("dependent set has an internal edge");
            return Err(Error::NotIndependent(a, b));
        }
        let working: VertexSet = kernel_solution.iter().map(|i| self.kernel_ids[i]).collect();
        Ok(lift_solution(&self.trace, working))
    }
}

/// Replays `trace` backwards over a solution expressed in working-graph ids.
pub fn lift_solution(trace: &[TraceEntry], kernel_solution: VertexSet) -> VertexSet {
    let mut sol = kernel_solution;
    for entry in trace.iter().rev() {
        entry.undo(&mut sol);
    }
    sol
}

/// `1 - n_k / n_g`, with `1` for an empty input. A kernel larger than the
/// input is clamped to `0` and logged.
pub fn reducibility(n_g: usize, n_k: usize) -> f64 {
    if n_g == 0 {
        return 1.0;
    }
    if n_k > n_g {
        warn!("kernel has {n_k} vertices, more than the {n_g} it started from");
        return 0.0;
    }
    1.0 - n_k as f64 / n_g as f64
}

/// Reducibility above which a quadratically embedded kernel needs fewer
/// atoms than the native instance: `1 - 1/sqrt(n)`.
pub fn embedding_threshold(n_g: usize) -> Result<f64> {
    if n_g == 0 {
        return Err(Error::InvalidSpec(
            "embedding threshold needs n_G >= 1".into(),
        ));
    }
    Ok(1.0 - 1.0 / (n_g as f64).sqrt())
}

/// Atoms needed to embed a kernel of reducibility `xi`: `round((1-xi)^2 n^2)`.
pub fn embedded_kernel_size(n_g: usize, xi: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidSpec(format!("xi = {xi} must lie in [0, 1]")));
    }
    let side = (1.0 - xi) * n_g as f64;
    Ok((side * side).round() as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub rules: Vec<Rule>,
    pub subproblem_cap: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            rules: Rule::ALL.to_vec(),
            subproblem_cap: crate::reductions::DEFAULT_SUBPROBLEM_CAP,
        }
    }
}

impl KernelConfig {
    pub fn new(mut rules: Vec<Rule>, subproblem_cap: usize) -> Self {
        rules.sort();
        rules.dedup();
        Self {
            rules,
            subproblem_cap,
        }
    }
}

/// Applies the enabled rules until none fires anywhere.
///
/// A FIFO of dirty vertices is seeded with every vertex in id order. Each
/// popped vertex is offered to the rules cheapest first; after a success the
/// touched vertices and their neighbors are queued again. When the queue
/// drains after any success, every alive vertex is queued once more, so the
/// result is a true fixpoint even for rules that look beyond distance two.
pub fn kernelize(g: &Graph, config: &KernelConfig) -> Result<KernelResult> {
    let mut work = g.clone();
    let n_g = g.num_alive();
    let m_g = g.num_edges();
    let budget = 10 * n_g.max(1) * (g.max_degree() + 1);

    let mut trace = Vec::new();
    let mut offset = 0u64;
    let mut rule_counts: BTreeMap<Rule, u64> = config.rules.iter().map(|&r| (r, 0)).collect();
    let mut steps = 0usize;

    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut queued: Vec<bool> = Vec::new();
    let enqueue = |queue: &mut VecDeque<usize>, queued: &mut Vec<bool>, v: usize| {
        if queued.len() <= v {
            queued.resize(v + 1, false);
        }
        if !queued[v] {
            queued[v] = true;
            queue.push_back(v);
        }
    };

    loop {
        for v in work.alive_vertices().collect::<Vec<_>>() {
            enqueue(&mut queue, &mut queued, v);
        }
        let mut progressed = false;
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            if !work.is_alive(v) {
                continue;
            }
            for &rule in &config.rules {
                let out = apply_rule(&mut work, rule, v, config.subproblem_cap)?;
                if !out.applied {
                    continue;
                }
                let entry = out.entry.expect("applied rules record an entry");
                offset += entry.offset_delta();
                trace.push(entry);
                *rule_counts.entry(rule).or_default() += 1;
                steps += 1;
                if steps > budget {
                    return Err(Error::StepBudget(budget));
                }
                progressed = true;
                let mut dirty = out.touched.clone();
                for t in &out.touched {
                    for &u in work.adjacent(t) {
                        dirty.insert(u);
                    }
                }
                for u in dirty {
                    if work.is_alive(u) {
                        enqueue(&mut queue, &mut queued, u);
                    }
                }
                if work.is_alive(v) {
                    enqueue(&mut queue, &mut queued, v);
                }
                break;
            }
        }
        if !progressed {
            break;
        }
    }

    debug_assert!(work.audit().is_ok());
    let (kernel, kernel_ids) = work.compact();
    let n_k = kernel.num_alive();
    Ok(KernelResult {
        m_k: kernel.num_edges(),
        kernel,
        kernel_ids,
        offset,
        trace,
        n_g,
        n_k,
        m_g,
        xi: reducibility(n_g, n_k),
        rule_counts,
    })
}

/// First `(rule, vertex)` of `g` where an enabled rule still fires, if any.
/// Each rule is tried on a scratch copy.
pub fn fixpoint_violation(g: &Graph, config: &KernelConfig) -> Result<Option<(Rule, usize)>> {
    for v in g.alive_vertices() {
        for &rule in &config.rules {
            let mut scratch = g.clone();
            if apply_rule(&mut scratch, rule, v, config.subproblem_cap)?.applied {
                return Ok(Some((rule, v)));
            }
        }
    }
    Ok(None)
}
