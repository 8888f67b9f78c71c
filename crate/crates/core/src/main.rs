use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rydberg_mwis::generate::{generate_instance, InstanceSpec};
use rydberg_mwis::harness::{run_to_dir, EnsembleSpec};
use rydberg_mwis::io::{read_graph, read_json, write_json, GraphJson, KernelJson};
use rydberg_mwis::reductions::DEFAULT_SUBPROBLEM_CAP;
use rydberg_mwis::solver::{solve_branch_and_bound, solve_exhaustive, SolveBudget, SolveStatus};
use rydberg_mwis::{kernelize, KernelConfig, Result, Rule, VertexSet};

#[derive(Parser)]
#[command(
    version,
    about = "MWIS kernelization on random unit-disk lattice graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one instance and write it as graph JSON.
    Generate {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        rb_sq: u64,
        /// Weights are drawn uniformly from 1..=W; 1 gives an unweighted graph.
        #[arg(long, default_value_t = 1)]
        weights: u64,
        #[arg(long)]
        geometry_seed: u64,
        #[arg(long, default_value_t = 0)]
        weight_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce a graph to its kernel and write the result JSON.
    Kernelize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated subset of isolated,pendant,simplicial,fold,twin,unconfined.
        #[arg(
            long,
            default_value = "isolated,pendant,simplicial,fold,twin,unconfined"
        )]
        rules: String,
        #[arg(long, default_value_t = DEFAULT_SUBPROBLEM_CAP)]
        unconfined_cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a graph exactly; prints the solution as JSON on stdout.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Bnb)]
        method: Method,
        #[arg(long, default_value_t = 10_000_000)]
        budget_nodes: u64,
        /// Largest graph the exhaustive method accepts.
        #[arg(long, default_value_t = 20)]
        max_exhaustive: usize,
    },
    /// Run an ensemble sweep described by a JSON spec.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the spec's worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Bnb,
}

#[derive(Serialize)]
struct SolveReport {
    weight: u64,
    vertices: VertexSet,
    status: &'static str,
    nodes: Option<u64>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            size,
            density,
            rb_sq,
            weights,
            geometry_seed,
            weight_seed,
            out,
        } => {
            let spec = InstanceSpec {
                size,
                density,
                rb_sq,
                weight_max: weights,
                geometry_seed,
                weight_seed,
            };
            let g = generate_instance(&spec)?;
            write_json(&out, &GraphJson::from_graph(&g, spec.meta()))
        }
        Command::Kernelize {
            input,
            rules,
            unconfined_cap,
            out,
        } => {
            let (g, meta) = read_graph(&input)?;
            let config = KernelConfig::new(Rule::parse_list(&rules)?, unconfined_cap);
            let r = kernelize(&g, &config)?;
            write_json(&out, &KernelJson::from_result(&r, meta))
        }
        Command::Solve {
            input,
            method,
            budget_nodes,
            max_exhaustive,
        } => {
            let (g, _) = read_graph(&input)?;
            let budget = SolveBudget {
                max_vertices_exhaustive: max_exhaustive,
                max_nodes_bnb: budget_nodes,
                ..SolveBudget::default()
            };
            let report = match method {
                Method::Exhaustive => {
                    let s = solve_exhaustive(&g, &budget)?;
                    SolveReport {
                        weight: s.weight,
                        vertices: s.vertices,
                        status: "optimal",
                        nodes: None,
                    }
                }
                Method::Bnb => {
                    let out = solve_branch_and_bound(&g, &budget);
                    let status = match out.status {
                        SolveStatus::Optimal => "optimal",
                        SolveStatus::BudgetExceeded => "budget_exceeded",
                    };
                    SolveReport {
                        weight: out.solution.weight,
                        vertices: out.solution.vertices,
                        status,
                        nodes: Some(out.nodes),
                    }
                }
            };
            println!("{}", serde_json::to_string(&report)?);
            Ok(())
        }
        Command::Ensemble {
            config,
            out_dir,
            workers,
        } => {
            let mut spec: EnsembleSpec = read_json(&config)?;
            if let Some(w) = workers {
                spec.workers = w;
            }
            run_to_dir(&spec, &out_dir).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
