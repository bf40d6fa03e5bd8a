//! Batch experiments: every algorithm for several iterations, one CSV per run
//! plus a summary with per-algorithm means and ranks.

pub mod cli;
pub mod config_file;
mod csv;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::domain::rng::mix_words;
use crate::domain::{Algorithm, SimulationConfig};
use crate::engine::SimulationModel;
use crate::error::{Error, Result};
use crate::metrics::{assign_ranks, average_summaries, summarize, RunSummary, StepMetricsRow};

pub use self::cli::parse_cli;
pub use self::csv::{format_real, write_run_csv, write_summary_csv, RUN_CSV_HEADER, SUMMARY_CSV_HEADER};

/// Tag mixed into the world seed so it never coincides with a run seed.
const WORLD_TAG: u64 = 0x0057_4F52_4C44;

/// Seed for the dynamics of one `(algorithm, iteration)` run.
pub fn run_seed(base_seed: u64, algorithm: Algorithm, iteration: u32) -> u64 {
    mix_words(&[base_seed, algorithm.index(), iteration as u64])
}

/// Seed for the population, graph and initial catalog of an iteration.
/// Shared by every algorithm so they are compared on the same world.
pub fn world_seed(base_seed: u64, iteration: u32) -> u64 {
    mix_words(&[base_seed, WORLD_TAG, iteration as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchPlan {
    /// Parameters shared by every run; `algorithm` and seeds are overridden per run.
    pub base: SimulationConfig,
    pub algorithms: Vec<Algorithm>,
    pub iterations: u32,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    pub jobs: usize,
    /// Optional edge-list export of the first iteration's follow graph.
    pub export_graph: Option<PathBuf>,
}

impl Default for BatchPlan {
    fn default() -> Self {
        BatchPlan {
            base: SimulationConfig::default(),
            algorithms: Algorithm::ALL.to_vec(),
            iterations: 5,
            base_seed: 0,
            out_dir: PathBuf::from("results"),
            jobs: default_jobs(),
            export_graph: None,
        }
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// One scheduled simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub iteration: u32,
    pub run_seed: u64,
    pub world_seed: u64,
}

impl RunSpec {
    pub fn run_id(&self) -> String {
        format!("{}_{}", self.algorithm, self.iteration)
    }

    pub fn file_name(&self) -> String {
        format!("run_{}_{}.csv", self.algorithm, self.iteration)
    }
}

impl BatchPlan {
    /// Runs in output order: algorithm-major, iterations numbered from 1.
    pub fn runs(&self) -> Vec<RunSpec> {
        self.algorithms
            .iter()
            .flat_map(|&algorithm| {
                (1..=self.iterations).map(move |iteration| (algorithm, iteration))
            })
            .map(|(algorithm, iteration)| RunSpec {
                algorithm,
                iteration,
                run_seed: run_seed(self.base_seed, algorithm, iteration),
                world_seed: world_seed(self.base_seed, iteration),
            })
            .collect()
    }

    pub fn config_for(&self, run: &RunSpec) -> SimulationConfig {
        SimulationConfig {
            algorithm: run.algorithm,
            rng_seed: run.run_seed,
            world_seed: Some(run.world_seed),
            ..self.base.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let violations = self.base.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidConfig(violations));
        }
        if self.algorithms.is_empty() || self.iterations == 0 {
            return Err(Error::invalid("a batch needs at least one algorithm and one iteration"));
        }
        let mut algs = self.algorithms.clone();
        algs.sort();
        algs.dedup();
        if algs.len() != self.algorithms.len() {
            return Err(Error::invalid("duplicate algorithm in batch"));
        }
        Ok(())
    }
}

/// Outcome of one finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub spec: RunSpec,
    pub rows: Vec<StepMetricsRow>,
    pub summary: RunSummary,
}

/// Everything a batch produced.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub runs: Vec<RunResult>,
    /// One averaged, ranked summary per algorithm, in plan order.
    pub aggregates: Vec<RunSummary>,
    pub files: Vec<PathBuf>,
}

impl BatchReport {
    pub fn aggregate(&self, algorithm: Algorithm) -> Option<&RunSummary> {
        self.aggregates.iter().find(|s| s.algorithm == algorithm)
    }
}

/// Runs one simulation of the plan.
pub fn execute_run(plan: &BatchPlan, spec: &RunSpec) -> Result<RunResult> {
    let config = plan.config_for(spec);
    let steps = config.timesteps;
    let mut model = SimulationModel::new(config)?;
    let rows = model.run_for(steps);
    let summary = summarize(&rows, spec.algorithm, spec.iteration);
    Ok(RunResult {
        spec: *spec,
        rows,
        summary,
    })
}

/// Runs every simulation (without writing anything) and aggregates them.
pub fn simulate_batch(plan: &BatchPlan) -> Result<(Vec<RunResult>, Vec<RunSummary>)> {
    plan.validate()?;
    let specs = plan.runs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let runs: Vec<RunResult> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| execute_run(plan, spec))
            .collect::<Result<Vec<_>>>()
    })?;
    let aggregates = aggregate(&plan.algorithms, &runs);
    Ok((runs, aggregates))
}

fn aggregate(algorithms: &[Algorithm], runs: &[RunResult]) -> Vec<RunSummary> {
    let mut aggregates: Vec<RunSummary> = algorithms
        .iter()
        .map(|&alg| {
            let mine: Vec<&RunSummary> = runs
                .iter()
                .filter(|r| r.spec.algorithm == alg)
                .map(|r| &r.summary)
                .collect();
            average_summaries(alg, &mine)
        })
        .collect();
    assign_ranks(&mut aggregates);
    aggregates
}

fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Runs the plan and writes `run_<algorithm>_<iteration>.csv` files plus `summary.csv`.
///
/// The output directory is checked before any simulation starts. Results do not
/// depend on `jobs`.
pub fn run_batch(plan: &BatchPlan) -> Result<BatchReport> {
    plan.validate()?;
    ensure_writable(&plan.out_dir)?;
    if let Some(path) = &plan.export_graph {
        let spec = plan.runs()[0];
        let (_, graph) = crate::netgen::generate_world(&plan.config_for(&spec))?;
        fs::write(path, graph.to_edge_list()).map_err(|e| Error::io(path, e))?;
    }

    let (runs, aggregates) = simulate_batch(plan)?;
    let mut files = Vec::with_capacity(runs.len() + 1);
    for run in &runs {
        let path = plan.out_dir.join(run.spec.file_name());
        write_run_csv(&path, &run.spec, &run.rows)?;
        files.push(path);
    }
    let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let path = plan.out_dir.join("summary.csv");
    write_summary_csv(&path, &summaries, &aggregates)?;
    files.push(path);
    Ok(BatchReport {
        runs,
        aggregates,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_has_25_distinct_runs() {
        let plan = BatchPlan::default();
        let runs = plan.runs();
        assert_eq!(runs.len(), 25);
        let mut seeds: Vec<u64> = runs.iter().map(|r| r.run_seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 25);
        let mut pairs: Vec<(Algorithm, u32)> = runs.iter().map(|r| (r.algorithm, r.iteration)).collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 25);
    }

    #[test]
    fn algorithms_share_the_world_of_an_iteration() {
        let runs = BatchPlan::default().runs();
        let world = |alg, it| runs.iter().find(|r| r.algorithm == alg && r.iteration == it).unwrap().world_seed;
        assert_eq!(world(Algorithm::Random, 2), world(Algorithm::ItemKnn, 2));
        assert_ne!(world(Algorithm::Random, 2), world(Algorithm::Random, 3));
    }

    #[test]
    fn seeds_do_not_depend_on_the_algorithm_list() {
        let full = BatchPlan::default();
        let single = BatchPlan {
            algorithms: vec![Algorithm::ContentBased],
            ..BatchPlan::default()
        };
        let a = full.runs().into_iter().filter(|r| r.algorithm == Algorithm::ContentBased).collect::<Vec<_>>();
        assert_eq!(a, single.runs());
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let mut plan = BatchPlan::default();
        plan.base.misinfo_pct = 2.0;
        assert!(matches!(plan.validate(), Err(Error::InvalidConfig(_))));
        let plan = BatchPlan {
            algorithms: vec![Algorithm::Random, Algorithm::Random],
            ..BatchPlan::default()
        };
        assert!(plan.validate().is_err());
    }
}
