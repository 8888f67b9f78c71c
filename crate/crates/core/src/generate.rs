//! Random unit-disk instances on a partially filled square lattice.
//!
//! An `L x L` grid (spacing 1) is filled with exactly `round(rho * L^2)` atoms
//! on distinct sites, and two atoms interact iff their squared distance is at
//! most `rb_sq`. Distances are compared as integers.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{rng_from_seed, uniform_below};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    /// Grid side length `L`.
    pub size: usize,
    /// Fraction of occupied sites, in `(0, 1]`.
    pub density: f64,
    /// Squared blockade radius in lattice units.
    pub rb_sq: u64,
    /// Weights are drawn from `1..=weight_max`; `1` gives unweighted MIS.
    pub weight_max: u64,
    pub geometry_seed: u64,
    pub weight_seed: u64,
}

impl InstanceSpec {
    pub fn unweighted(size: usize, density: f64, rb_sq: u64, geometry_seed: u64) -> Self {
        Self {
            size,
            density,
            rb_sq,
            weight_max: 1,
            geometry_seed,
            weight_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidSpec(format!(
                "L = {} must be at least 2",
                self.size
            )));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "rho = {} must lie in (0, 1]",
                self.density
            )));
        }
        if self.rb_sq == 0 {
            return Err(Error::InvalidSpec("rb_sq must be positive".into()));
        }
        if self.weight_max == 0 {
            return Err(Error::InvalidSpec("W must be at least 1".into()));
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.size * self.size
    }

    pub fn num_atoms(&self) -> usize {
        (self.density * self.num_sites() as f64).round() as usize
    }

    pub fn meta(&self) -> Map<String, Value> {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("InstanceSpec serializes to an object"),
        }
    }
}

/// Lattice displacements `(dx, dy) != (0, 0)` with `dx^2 + dy^2 <= rb_sq`.
pub fn lattice_offsets(rb_sq: u64) -> Vec<(i64, i64)> {
    let r = (rb_sq as f64).sqrt().ceil() as i64 + 1;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if (dx, dy) != (0, 0) && (dx * dx + dy * dy) as u64 <= rb_sq {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Places the atoms and connects the blockaded pairs. All weights are 1.
///
/// Vertex ids follow row-major site order; coordinates are `(x, y)` with
/// site index `y * L + x`.
pub fn generate_geometry(spec: &InstanceSpec) -> Result<Graph> {
    spec.validate()?;
    let k = spec.num_atoms();
    if k == 0 {
        return Err(Error::EmptyInstance);
    }
    let l = spec.size;
    let n_sites = spec.num_sites();

    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    let mut rng = rng_from_seed(spec.geometry_seed);
    let mut sites: Vec<usize> = (0..n_sites).collect();
    for i in 0..k {
        let j = i + uniform_below(&mut rng, (n_sites - i) as u64) as usize;
        sites.swap(i, j);
    }
    let mut chosen = sites[..k].to_vec();
    chosen.sort_unstable();

    let mut vertex_at = vec![usize::MAX; n_sites];
    let mut g = Graph::new(k);
    for (v, &s) in chosen.iter().enumerate() {
        vertex_at[s] = v;
        g.set_coord(v, Some(((s % l) as i64, (s / l) as i64)));
    }

    let forward: Vec<(i64, i64)> = lattice_offsets(spec.rb_sq)
        .into_iter()
        .filter(|&(dx, dy)| dy > 0 || (dy == 0 && dx > 0))
        .collect();
    let side = l as i64;
    for (v, &s) in chosen.iter().enumerate() {
        let (x, y) = ((s % l) as i64, (s / l) as i64);
        for &(dx, dy) in &forward {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= side || ny >= side {
                continue;
            }
            let u = vertex_at[(ny * side + nx) as usize];
            if u != usize::MAX {
                g.add_edge(v, u)?;
            }
        }
    }
    Ok(g)
}

/// Draws i.i.d. integer weights uniform on `1..=weight_max`, in vertex order.
pub fn assign_weights(mut g: Graph, weight_max: u64, weight_seed: u64) -> Result<Graph> {
    if weight_max == 0 {
        return Err(Error::InvalidSpec("W must be at least 1".into()));
    }
    let ids: Vec<usize> = g.alive_vertices().collect();
    if weight_max == 1 {
        for v in ids {
            g.set_weight(v, 1);
        }
        return Ok(g);
    }
    let mut rng = rng_from_seed(weight_seed);
    for v in ids {
        g.set_weight(v, 1 + uniform_below(&mut rng, weight_max));
    }
    Ok(g)
}

/// Geometry followed by weights.
pub fn generate_instance(spec: &InstanceSpec) -> Result<Graph> {
    let g = generate_geometry(spec)?;
    assign_weights(g, spec.weight_max, spec.weight_seed)
}
