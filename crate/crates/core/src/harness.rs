//! Ensemble sweeps over `(L, rho, rb_sq, W)` with per-instance CSV records
//! and per-cell summaries.
//!
//! Seeds are derived, never drawn: cell `c`, geometry `g` and weight draw `j`
//! use
//!
//! ```text
//! geometry_seed = derive_seed(base_seed, [0, c, g])
//! weight_seed   = derive_seed(base_seed, [1, c, g, j])
//! ```
//!
//! (see [`crate::rng::derive_seed`]), so every row can be regenerated on its
//! own and the output does not depend on worker scheduling.

use std::fs;
use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{assign_weights, generate_geometry, InstanceSpec};
use crate::io::write_json;
use crate::kernel::{kernelize, reducibility, KernelConfig};
use crate::reductions::{Rule, DEFAULT_SUBPROBLEM_CAP};
use crate::rng::derive_seed;

pub const RECORD_HEADER: [&str; 20] = [
    "L",
    "rho",
    "rb_sq",
    "W",
    "geometry_seed",
    "weight_seed",
    "n_G",
    "m_G",
    "n_K",
    "m_K",
    "xi",
    "offset",
    "fully_reduced",
    "isolated",
    "pendant",
    "simplicial",
    "fold",
    "twin",
    "unconfined",
    "elapsed_ms",
];

pub const SUMMARY_HEADER: [&str; 15] = [
    "L",
    "rho",
    "rb_sq",
    "W",
    "num_G",
    "num_K",
    "r_K",
    "xi_mean",
    "xi_std",
    "xi_mean_finite",
    "xi_std_finite",
    "n_G_mean",
    "xi_star",
    "num_failed",
    "num_rows",
];

/// How geometries are chosen for weighted cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryMode {
    /// Every geometry seed is used as drawn.
    Fresh,
    /// Weighted cells only keep geometries whose unweighted kernel is
    /// nonempty; candidates are screened in seed order.
    #[default]
    Filtered,
}

fn one() -> usize {
    1
}

fn default_rules() -> Vec<Rule> {
    Rule::ALL.to_vec()
}

fn default_cap() -> usize {
    DEFAULT_SUBPROBLEM_CAP
}

fn default_screening() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(rename = "L_values")]
    pub l_values: Vec<usize>,
    pub rho_values: Vec<f64>,
    pub rb_sq_values: Vec<u64>,
    #[serde(default = "one_u64")]
    pub weight_max: u64,
    pub num_geometries: usize,
    #[serde(default = "one")]
    pub weight_realizations_per_geometry: usize,
    pub base_seed: u64,
    #[serde(default = "default_rules")]
    pub rules: Vec<Rule>,
    #[serde(default = "default_cap")]
    pub unconfined_cap: usize,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default)]
    pub geometry_mode: GeometryMode,
    /// Filtered mode gives up after `screening_factor * num_geometries`
    /// candidate geometries per cell.
    #[serde(default = "default_screening")]
    pub screening_factor: usize,
    /// Wall-clock timing makes `elapsed_ms` nondeterministic, so it is off by
    /// default and the column is left empty.
    #[serde(default)]
    pub record_timing: bool,
}

fn one_u64() -> u64 {
    1
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.l_values.is_empty() || self.rho_values.is_empty() || self.rb_sq_values.is_empty() {
            return bad("L_values, rho_values and rb_sq_values must be nonempty");
        }
        if self.num_geometries == 0 || self.weight_realizations_per_geometry == 0 {
            return bad("num_geometries and weight_realizations_per_geometry must be at least 1");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.weight_max == 0 {
            return bad("weight_max must be at least 1");
        }
        if self.rules.is_empty() {
            return bad("at least one rule must be enabled");
        }
        Ok(())
    }

    /// Cartesian product in canonical order: `L`, then `rho`, then `rb_sq`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &l in &self.l_values {
            for &rho in &self.rho_values {
                for &rb_sq in &self.rb_sq_values {
                    out.push(Cell {
                        l,
                        rho,
                        rb_sq,
                        w: self.weight_max,
                    });
                }
            }
        }
        out
    }

    pub fn kernel_config(&self) -> KernelConfig {
        KernelConfig::new(self.rules.clone(), self.unconfined_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(rename = "L")]
    pub l: usize,
    pub rho: f64,
    pub rb_sq: u64,
    #[serde(rename = "W")]
    pub w: u64,
}

impl Cell {
    fn same(&self, other: &Cell) -> bool {
        self.l == other.l
            && self.rho.to_bits() == other.rho.to_bits()
            && self.rb_sq == other.rb_sq
            && self.w == other.w
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceStats {
    pub n_g: usize,
    pub m_g: usize,
    pub n_k: usize,
    pub m_k: usize,
    pub xi: f64,
    pub offset: u64,
    /// Applications per rule, in [`Rule::ALL`] order.
    pub rule_counts: [u64; 6],
    pub elapsed_ms: Option<u64>,
}

impl InstanceStats {
    pub fn fully_reduced(&self) -> bool {
        self.n_k == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleRecord {
    pub cell: Cell,
    pub geometry_seed: u64,
    pub weight_seed: u64,
    /// `Err` holds the message of a per-instance failure.
    pub stats: std::result::Result<InstanceStats, String>,
}

#[derive(Clone, Debug)]
struct Job {
    cell: Cell,
    geometry_seed: u64,
    weight_seed: u64,
}

fn run_instance(job: &Job, config: &KernelConfig, timing: bool) -> Result<InstanceStats> {
    let start = Instant::now();
    let spec = InstanceSpec {
        size: job.cell.l,
        density: job.cell.rho,
        rb_sq: job.cell.rb_sq,
        weight_max: job.cell.w,
        geometry_seed: job.geometry_seed,
        weight_seed: job.weight_seed,
    };
    let g = assign_weights(generate_geometry(&spec)?, spec.weight_max, spec.weight_seed)?;
    let r = kernelize(&g, config)?;
    let mut rule_counts = [0u64; 6];
    for (slot, rule) in rule_counts.iter_mut().zip(Rule::ALL) {
        *slot = r.count(rule);
    }
    Ok(InstanceStats {
        n_g: r.n_g,
        m_g: r.m_g,
        n_k: r.n_k,
        m_k: r.m_k,
        xi: r.xi,
        offset: r.offset,
        rule_counts,
        elapsed_ms: timing.then(|| start.elapsed().as_millis() as u64),
    })
}

/// `true` if the unweighted instance keeps a nonempty kernel. Failures count
/// as accepted so that they surface as error rows.
fn has_finite_kernel(cell: &Cell, geometry_seed: u64, config: &KernelConfig) -> bool {
    let spec = InstanceSpec::unweighted(cell.l, cell.rho, cell.rb_sq, geometry_seed);
    match generate_geometry(&spec).and_then(|g| kernelize(&g, config)) {
        Ok(r) => r.n_k > 0,
        Err(_) => true,
    }
}

fn geometry_seeds(
    spec: &EnsembleSpec,
    index: usize,
    cell: &Cell,
    config: &KernelConfig,
) -> Vec<u64> {
    let seed = |k: usize| derive_seed(spec.base_seed, &[0, index as u64, k as u64]);
    let wanted = spec.num_geometries;
    if cell.w == 1 || spec.geometry_mode == GeometryMode::Fresh {
        return (0..wanted).map(seed).collect();
    }
    let limit = wanted.saturating_mul(spec.screening_factor.max(1));
    let mut accepted = Vec::with_capacity(wanted);
    let mut next = 0;
    while accepted.len() < wanted && next < limit {
        let batch: Vec<usize> = (next..(next + wanted).min(limit)).collect();
        next += batch.len();
        let verdicts: Vec<(u64, bool)> = batch
            .par_iter()
            .map(|&k| (seed(k), has_finite_kernel(cell, seed(k), config)))
            .collect();
        accepted.extend(
            verdicts
                .into_iter()
                .filter(|&(_, keep)| keep)
                .map(|(s, _)| s),
        );
    }
    accepted.truncate(wanted);
    if accepted.len() < wanted {
        warn!(
            "cell L={} rho={} rb_sq={}: {} of {} geometries have a finite unweighted kernel",
            cell.l,
            cell.rho,
            cell.rb_sq,
            accepted.len(),
            wanted
        );
    }
    accepted
}

/// One record per (cell, geometry, weight draw), in canonical order.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Vec<EnsembleRecord>> {
    spec.validate()?;
    let config = spec.kernel_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()?;
    pool.install(|| {
        let mut jobs = Vec::new();
        for (ci, cell) in spec.cells().into_iter().enumerate() {
            for (gi, geometry_seed) in geometry_seeds(spec, ci, &cell, &config)
                .into_iter()
                .enumerate()
            {
                for j in 0..spec.weight_realizations_per_geometry {
                    let weight_seed =
                        derive_seed(spec.base_seed, &[1, ci as u64, gi as u64, j as u64]);
                    jobs.push(Job {
                        cell,
                        geometry_seed,
                        weight_seed,
                    });
                }
            }
        }
        info!(
            "running {} instances on {} workers",
            jobs.len(),
            spec.workers
        );
        Ok(jobs
            .par_iter()
            .map(|job| EnsembleRecord {
                cell: job.cell,
                geometry_seed: job.geometry_seed,
                weight_seed: job.weight_seed,
                stats: run_instance(job, &config, spec.record_timing).map_err(|e| e.to_string()),
            })
            .collect())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: Cell,
    pub num_g: usize,
    pub num_k: usize,
    pub r_k: f64,
    pub xi_mean: f64,
    pub xi_std: f64,
    pub xi_mean_finite: Option<f64>,
    pub xi_std_finite: Option<f64>,
    pub n_g_mean: f64,
    pub xi_star: f64,
    pub num_failed: usize,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-cell statistics. Reducibility is recomputed from the integer vertex
/// counts, so summaries built from a parsed `records.csv` match exactly.
/// Cells whose rows all failed are omitted.
pub fn aggregate(records: &[EnsembleRecord]) -> Vec<CellSummary> {
    let mut cells: Vec<(Cell, Vec<&InstanceStats>, usize)> = Vec::new();
    for r in records {
        let pos = match cells.iter().position(|(c, _, _)| c.same(&r.cell)) {
            Some(p) => p,
            None => {
                cells.push((r.cell, Vec::new(), 0));
                cells.len() - 1
            }
        };
        match &r.stats {
            Ok(s) => cells[pos].1.push(s),
            Err(_) => cells[pos].2 += 1,
        }
    }
    cells
        .into_iter()
        .filter(|(_, rows, _)| !rows.is_empty())
        .map(|(cell, rows, num_failed)| {
            let xis: Vec<f64> = rows.iter().map(|s| reducibility(s.n_g, s.n_k)).collect();
            let finite: Vec<f64> = rows
                .iter()
                .filter(|s| s.n_k > 0)
                .map(|s| reducibility(s.n_g, s.n_k))
                .collect();
            let (xi_mean, xi_std) = mean_std(&xis);
            let (xi_mean_finite, xi_std_finite) = if finite.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_std(&finite);
                (Some(m), Some(s))
            };
            let n_g_mean = rows.iter().map(|s| s.n_g as f64).sum::<f64>() / rows.len() as f64;
            CellSummary {
                cell,
                num_g: rows.len(),
                num_k: finite.len(),
                r_k: finite.len() as f64 / rows.len() as f64,
                xi_mean,
                xi_std,
                xi_mean_finite,
                xi_std_finite,
                n_g_mean,
                xi_star: 1.0 - 1.0 / n_g_mean.sqrt(),
                num_failed,
            }
        })
        .collect()
}

/// `%.6g`-style rendering: six significant digits, trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..6).contains(&exp) {
        trim(format!("{:.*}", (5 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa.to_string()), sign, exp.abs())
    }
}

fn record_row(r: &EnsembleRecord) -> Vec<String> {
    let c = &r.cell;
    let mut row = vec![
        c.l.to_string(),
        format_float(c.rho),
        c.rb_sq.to_string(),
        c.w.to_string(),
        r.geometry_seed.to_string(),
        r.weight_seed.to_string(),
    ];
    match &r.stats {
        Ok(s) => {
            row.extend([
                s.n_g.to_string(),
                s.m_g.to_string(),
                s.n_k.to_string(),
                s.m_k.to_string(),
                format_float(s.xi),
                s.offset.to_string(),
                s.fully_reduced().to_string(),
            ]);
            row.extend(s.rule_counts.iter().map(u64::to_string));
            row.push(s.elapsed_ms.map(|t| t.to_string()).unwrap_or_default());
        }
        Err(_) => row.extend(std::iter::repeat_n(String::new(), RECORD_HEADER.len() - 6)),
    }
    row
}

pub fn write_records_csv(path: &Path, records: &[EnsembleRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record(record_row(r))?;
    }
    w.flush()?;
    Ok(())
}

fn parse<T: std::str::FromStr>(field: &str, name: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Malformed(format!("cannot parse {name} = `{field}`")))
}

/// Parses a `records.csv` written by [`write_records_csv`]. Rows with empty
/// result columns come back as failures.
pub fn read_records_csv(path: &Path) -> Result<Vec<EnsembleRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_HEADER {
        return Err(Error::Malformed(format!(
            "unexpected records header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| row.get(i).unwrap_or("");
        let cell = Cell {
            l: parse(f(0), "L")?,
            rho: parse(f(1), "rho")?,
            rb_sq: parse(f(2), "rb_sq")?,
            w: parse(f(3), "W")?,
        };
        let stats = if f(6).is_empty() {
            Err("failed instance".to_string())
        } else {
            let mut rule_counts = [0u64; 6];
            for (k, slot) in rule_counts.iter_mut().enumerate() {
                *slot = parse(f(13 + k), RECORD_HEADER[13 + k])?;
            }
            Ok(InstanceStats {
                n_g: parse(f(6), "n_G")?,
                m_g: parse(f(7), "m_G")?,
                n_k: parse(f(8), "n_K")?,
                m_k: parse(f(9), "m_K")?,
                xi: parse(f(10), "xi")?,
                offset: parse(f(11), "offset")?,
                rule_counts,
                elapsed_ms: if f(19).is_empty() {
                    None
                } else {
                    Some(parse(f(19), "elapsed_ms")?)
                },
            })
        };
        out.push(EnsembleRecord {
            cell,
            geometry_seed: parse(f(4), "geometry_seed")?,
            weight_seed: parse(f(5), "weight_seed")?,
            stats,
        });
    }
    Ok(out)
}

pub fn write_summary_csv(path: &Path, summary: &[CellSummary]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for s in summary {
        w.write_record([
            s.cell.l.to_string(),
            format_float(s.cell.rho),
            s.cell.rb_sq.to_string(),
            s.cell.w.to_string(),
            s.num_g.to_string(),
            s.num_k.to_string(),
            format_float(s.r_k),
            format_float(s.xi_mean),
            format_float(s.xi_std),
            opt(s.xi_mean_finite),
            opt(s.xi_std_finite),
            format_float(s.n_g_mean),
            format_float(s.xi_star),
            s.num_failed.to_string(),
            (s.num_g + s.num_failed).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    software: &'static str,
    version: &'static str,
    spec: &'a EnsembleSpec,
    num_records: usize,
    num_failed: usize,
    records_header: &'static [&'static str],
    summary_header: &'static [&'static str],
}

/// Runs `spec` and writes `records.csv`, `summary.csv` and `manifest.json`
/// into `dir`.
pub fn run_to_dir(spec: &EnsembleSpec, dir: &Path) -> Result<Vec<EnsembleRecord>> {
    fs::create_dir_all(dir)?;
    let records = run_ensemble(spec)?;
    write_records_csv(&dir.join("records.csv"), &records)?;
    write_summary_csv(&dir.join("summary.csv"), &aggregate(&records))?;
    let manifest = Manifest {
        software: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        spec,
        num_records: records.len(),
        num_failed: records.iter().filter(|r| r.stats.is_err()).count(),
        records_header: &RECORD_HEADER,
        summary_header: &SUMMARY_HEADER,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> EnsembleSpec {
        EnsembleSpec {
            l_values: vec![6],
            rho_values: vec![0.8],
            rb_sq_values: vec![4],
            weight_max: 1,
            num_geometries: 10,
            weight_realizations_per_geometry: 1,
            base_seed: 11,
            rules: Rule::ALL.to_vec(),
            unconfined_cap: DEFAULT_SUBPROBLEM_CAP,
            workers: 2,
            geometry_mode: GeometryMode::Filtered,
            screening_factor: 10,
            record_timing: false,
        }
    }

    fn stats(n_g: usize, n_k: usize) -> InstanceStats {
        InstanceStats {
            n_g,
            m_g: 0,
            n_k,
            m_k: 0,
            xi: reducibility(n_g, n_k),
            offset: 0,
            rule_counts: [0; 6],
            elapsed_ms: None,
        }
    }

    fn record(n_g: usize, n_k: usize) -> EnsembleRecord {
        EnsembleRecord {
            cell: Cell {
                l: 10,
                rho: 1.0,
                rb_sq: 1,
                w: 1,
            },
            geometry_seed: 0,
            weight_seed: 0,
            stats: Ok(stats(n_g, n_k)),
        }
    }

    #[test]
    fn one_cell_ten_rows() {
        let recs = run_ensemble(&small_spec()).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(recs.iter().all(|r| r.stats.as_ref().unwrap().n_g == 29));
    }

    #[test]
    fn full_density_rows_have_forced_size() {
        let spec = EnsembleSpec {
            l_values: vec![10],
            rho_values: vec![1.0],
            num_geometries: 3,
            ..small_spec()
        };
        let recs = run_ensemble(&spec).unwrap();
        assert!(recs.iter().all(|r| r.stats.as_ref().unwrap().n_g == 100));
    }

    #[test]
    fn aggregate_examples() {
        let all_reduced = aggregate(&[record(100, 0), record(100, 0)]);
        assert_eq!(all_reduced[0].num_k, 0);
        assert_eq!(all_reduced[0].r_k, 0.0);
        assert_eq!(all_reduced[0].xi_mean, 1.0);
        assert_eq!(all_reduced[0].xi_mean_finite, None);
        assert!((all_reduced[0].xi_star - 0.9).abs() < 1e-12);

        let mixed = aggregate(&[record(10, 0), record(10, 5)]);
        assert_eq!(mixed[0].num_k, 1);
        assert_eq!(mixed[0].r_k, 0.5);
        assert_eq!(mixed[0].xi_mean, 0.75);
        assert_eq!(mixed[0].xi_std, 0.25);
        assert_eq!(mixed[0].xi_mean_finite, Some(0.5));
    }

    #[test]
    fn failures_become_rows_not_aborts() {
        let spec = EnsembleSpec {
            l_values: vec![2],
            rho_values: vec![0.1],
            ..small_spec()
        };
        let recs = run_ensemble(&spec).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(recs.iter().all(|r| r.stats.is_err()));
        assert!(aggregate(&recs).is_empty());
        let row = record_row(&recs[0]);
        assert_eq!(row.len(), RECORD_HEADER.len());
        assert!(row[6..].iter().all(String::is_empty));
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.75), "0.75");
        assert_eq!(format_float(0.7), "0.7");
        assert_eq!(format_float(2.0 / 3.0), "0.666667");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(123456.0), "123456");
        assert_eq!(format_float(1234567.0), "1.23457e+06");
        assert_eq!(format_float(0.00001234), "1.234e-05");
        assert_eq!(format_float(0.0001234), "0.0001234");
        assert_eq!(format_float(-0.5), "-0.5");
    }

    #[test]
    fn spec_json_uses_documented_field_names() {
        let text = r#"{"L_values":[10],"rho_values":[0.7],"rb_sq_values":[1,2],
            "weight_max":1,"num_geometries":5,"base_seed":3}"#;
        let spec: EnsembleSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.cells().len(), 2);
        assert_eq!(spec.rules, Rule::ALL.to_vec());
        assert_eq!(spec.workers, 1);
        assert_eq!(spec.geometry_mode, GeometryMode::Filtered);
        assert!(EnsembleSpec { workers: 0, ..spec }.validate().is_err());
    }
}
