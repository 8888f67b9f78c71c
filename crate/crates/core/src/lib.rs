//! Kernelization and exact solving of maximum (weighted) independent set
//! instances on random unit-disk graphs drawn from partially filled square
//! lattices, plus an ensemble harness that measures how far the reductions
//! shrink them.

pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod reductions;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use generate::{assign_weights, generate_geometry, generate_instance, InstanceSpec};
pub use graph::{Graph, VertexSet};
pub use harness::{aggregate, run_ensemble, run_to_dir, EnsembleRecord, EnsembleSpec};
pub use kernel::{
    embedded_kernel_size, embedding_threshold, kernelize, lift_solution, reducibility,
    KernelConfig, KernelResult,
};
pub use reductions::{Rule, RuleOutcome, TraceEntry};
pub use solver::{solve_branch_and_bound, solve_exhaustive, SolveBudget, SolveStatus};
