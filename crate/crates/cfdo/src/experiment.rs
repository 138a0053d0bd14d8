//! Multi-run, multi-algorithm experiment driver: seeds runs, aggregates
//! finals, tests each algorithm against the first-listed baseline, and
//! renders CSV/JSON reports.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chaos::MapKind;
use crate::fdo::{optimize, BoundaryPolicy, FdoConfig, RunRecord};
use crate::objectives::{registry_lookup, Objective, REGISTRY_NAMES};
use crate::problems::{AssignmentInstance, AssignmentProblem, PenaltyConfig, PressureVesselProblem};
use crate::stats::{aggregate, mean, ranksum, SampleSet};

/// Names resolvable by [`resolve_objective`] beyond the function registry.
pub const PROBLEM_NAMES: [&str; 2] = ["vessel", "assignment"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Fdo,
    Cfdo(MapKind),
}

impl Algorithm {
    pub fn label(&self) -> String {
        match self {
            Algorithm::Fdo => "fdo".to_string(),
            Algorithm::Cfdo(map) => format!("cfdo-{map}"),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmParseError {
    #[error("unknown algorithm {name:?}; use fdo, cfdo:<map>, or cfdo-<map>")]
    Unknown { name: String },
    #[error("cfdo needs a map, e.g. cfdo:singer")]
    MissingMap,
    #[error("{0}")]
    BadMap(String),
}

impl FromStr for Algorithm {
    type Err = AlgorithmParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "fdo" {
            return Ok(Algorithm::Fdo);
        }
        if lower == "cfdo" {
            return Err(AlgorithmParseError::MissingMap);
        }
        for sep in [':', '-'] {
            if let Some(rest) = lower.strip_prefix(&format!("cfdo{sep}")) {
                let map = rest
                    .parse::<MapKind>()
                    .map_err(|e| AlgorithmParseError::BadMap(e.to_string()))?;
                return Ok(Algorithm::Cfdo(map));
            }
        }
        Err(AlgorithmParseError::Unknown { name: t.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// First entry is the baseline every other algorithm is tested against.
    pub algorithms: Vec<Algorithm>,
    /// Registry function name, "vessel", or "assignment".
    pub objective: String,
    pub population: usize,
    pub iterations: usize,
    pub runs: usize,
    /// Run k uses seed base_seed + k.
    pub base_seed: u64,
    pub wf: f64,
    pub boundary_policy: BoundaryPolicy,
    /// Penalty weight when the objective is the pressure vessel.
    pub lambda: f64,
    /// Thread count for the run pool; None uses the process default.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithms: vec![Algorithm::Fdo, Algorithm::Cfdo(MapKind::Singer)],
            objective: "F4".to_string(),
            population: 30,
            iterations: 50,
            runs: 30,
            base_seed: 0,
            wf: 0.0,
            boundary_policy: BoundaryPolicy::Redraw,
            lambda: 1e6,
            workers: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown objective {name:?}; valid names: {}, {}", REGISTRY_NAMES.join(", "), PROBLEM_NAMES.join(", "))]
    UnknownObjective { name: String },
    #[error("no algorithms configured")]
    NoAlgorithms,
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("{0}")]
    BadRunConfig(#[from] crate::fdo::InvalidConfigError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Look a search target up by name: the benchmark registry plus the two
/// applied problems. `lambda` only matters for the vessel.
pub fn resolve_objective(name: &str, lambda: f64) -> Result<Box<dyn Objective>, ExperimentError> {
    let lower = name.trim().to_ascii_lowercase();
    match lower.as_str() {
        "vessel" => Ok(Box::new(PressureVesselProblem::new(PenaltyConfig { lambda }))),
        "assignment" => Ok(Box::new(AssignmentProblem::new(AssignmentInstance::bundled()))),
        _ => match registry_lookup(name) {
            Ok(spec) => Ok(Box::new(spec)),
            Err(e) => Err(ExperimentError::UnknownObjective { name: e.name }),
        },
    }
}

fn make_run_config(algo: Algorithm, cfg: &ExperimentConfig, seed: u64) -> FdoConfig {
    let mut rc = match algo {
        Algorithm::Fdo => FdoConfig::fdo(cfg.population, cfg.iterations, seed),
        Algorithm::Cfdo(map) => FdoConfig::cfdo(map, cfg.population, cfg.iterations, seed),
    };
    rc.wf = cfg.wf;
    rc.boundary_policy = cfg.boundary_policy;
    rc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub mean: f64,
    /// None when a single run leaves the deviation undefined.
    pub std: Option<f64>,
    /// None when runs < 2; 1.0 by convention on the baseline row.
    pub p_value: Option<f64>,
    pub significant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmRuns {
    pub label: String,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub objective: String,
    pub algorithms: Vec<String>,
    pub population: usize,
    pub iterations: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub wf: f64,
    pub boundary: String,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub generated_at: String,
    pub version: String,
    pub config: ConfigEcho,
    pub rows: Vec<ReportRow>,
    pub runs: Vec<AlgorithmRuns>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if cfg.algorithms.is_empty() {
        return Err(ExperimentError::NoAlgorithms);
    }
    if cfg.runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    let objective = resolve_objective(&cfg.objective, cfg.lambda)?;
    for &algo in &cfg.algorithms {
        make_run_config(algo, cfg, cfg.base_seed).validate()?;
    }

    let runs = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()?
            .install(|| execute_runs(cfg, objective.as_ref())),
        None => execute_runs(cfg, objective.as_ref()),
    };

    let finals: Vec<Vec<f64>> = runs
        .iter()
        .map(|ar| ar.records.iter().map(|r| r.final_best_fitness).collect())
        .collect();
    let baseline = SampleSet::new(runs[0].label.clone(), finals[0].clone())
        .expect("runs >= 1 and finite fitness");

    let mut rows = Vec::with_capacity(cfg.algorithms.len());
    for (i, ar) in runs.iter().enumerate() {
        let values = &finals[i];
        let (m, std) = if values.len() >= 2 {
            let (m, s) = aggregate(values).expect("len checked");
            (m, Some(s))
        } else {
            (mean(values), None)
        };
        let (p_value, significant) = if cfg.runs < 2 {
            (None, None)
        } else if i == 0 {
            (Some(1.0), Some(false))
        } else {
            let sample = SampleSet::new(ar.label.clone(), values.clone()).expect("nonempty");
            let t = ranksum(&baseline, &sample);
            (Some(t.p_value), Some(t.significant))
        };
        rows.push(ReportRow {
            label: ar.label.clone(),
            mean: m,
            std,
            p_value,
            significant,
        });
    }

    Ok(ExperimentReport {
        generated_at: chrono::Utc::now().to_rfc3339(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            objective: cfg.objective.clone(),
            algorithms: cfg.algorithms.iter().map(|a| a.label()).collect(),
            population: cfg.population,
            iterations: cfg.iterations,
            runs: cfg.runs,
            base_seed: cfg.base_seed,
            wf: cfg.wf,
            boundary: cfg.boundary_policy.to_string(),
            lambda: cfg.lambda,
        },
        rows,
        runs,
    })
}

/// Runs are parallel within each algorithm; record order is by run index
/// regardless of worker count.
fn execute_runs(cfg: &ExperimentConfig, objective: &dyn Objective) -> Vec<AlgorithmRuns> {
    cfg.algorithms
        .iter()
        .map(|&algo| {
            let records: Vec<RunRecord> = (0..cfg.runs)
                .into_par_iter()
                .map(|k| {
                    let rc = make_run_config(algo, cfg, cfg.base_seed + k as u64);
                    optimize(&rc, objective)
                })
                .collect();
            AlgorithmRuns {
                label: algo.label(),
                records,
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "label,mean,std,p_value,significant,runs,pop,iters,seed";

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Timestamp-free table: identical configs give byte-identical output.
pub fn write_csv(report: &ExperimentReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.label,
            row.mean,
            opt_f64(row.std),
            opt_f64(row.p_value),
            row.significant.map(|b| b.to_string()).unwrap_or_default(),
            report.config.runs,
            report.config.population,
            report.config.iterations,
            report.config.base_seed,
        )?;
    }
    Ok(())
}

/// Full report: CSV rows plus config echo, metadata, and every run trace.
pub fn write_json(report: &ExperimentReport, out: &mut dyn Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    out.write_all(b"\n")
}
