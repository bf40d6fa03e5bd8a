use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use super::config_file::{load_config_file, parse_algorithms};
use super::BatchPlan;
use crate::error::{Error, Result};

/// Simulate misinformation spread under different recommendation algorithms.
///
/// Every flag is optional; defaults reproduce the reference experiment
/// (600 steps, 200 users, all five algorithms, 5 iterations). Values from
/// `--config` are applied first and flags override them.
#[derive(Debug, Parser)]
#[command(name = "misinfo-abm", version)]
pub struct Cli {
    /// Algorithm name (random, popularity, user_knn, item_knn, content_based), a comma-separated list, or `all`.
    #[arg(long, value_name = "NAME|all")]
    pub algorithm: Option<String>,
    /// Number of timesteps per run.
    #[arg(long)]
    pub steps: Option<u32>,
    /// Number of agents.
    #[arg(long)]
    pub users: Option<u32>,
    /// Mean number of accounts each agent follows.
    #[arg(long)]
    pub avg_followers: Option<f64>,
    /// Size of the initial content pool.
    #[arg(long)]
    pub initial_news: Option<u32>,
    /// Fake fraction of the initial pool.
    #[arg(long)]
    pub misinfo_pct: Option<f64>,
    /// Fraction of agents that are bots
    #[arg(long)]
    pub bot_pct: Option<f64>,
    /// Fraction of agents that are influencers
    #[arg(long)]
    pub influencer_pct: Option<f64>,
    /// Recommendations delivered to each active agent per step.
    #[arg(long)]
    pub recs_per_step: Option<usize>,
    /// Iterations per algorithm.
    #[arg(long)]
    pub iterations: Option<u32>,
    /// Base seed; run seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for the CSV files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// key=value configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Maximum number of runs in flight.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the first iteration's follow graph as an edge list.
    #[arg(long, value_name = "FILE")]
    pub export_graph: Option<PathBuf>,
}

impl Cli {
    /// Resolves defaults, the config file and flags into a validated plan.
    pub fn into_plan(self) -> Result<BatchPlan> {
        let mut plan = BatchPlan::default();
        if let Some(path) = &self.config {
            load_config_file(&mut plan, path)?;
        }
        if let Some(a) = &self.algorithm {
            plan.algorithms = parse_algorithms(a).map_err(Error::Usage)?;
        }
        let c = &mut plan.base;
        macro_rules! set {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag { $field = v; })*
            };
        }
        set! {
            steps => c.timesteps,
            users => c.n_users,
            avg_followers => c.avg_followers,
            initial_news => c.initial_news,
            misinfo_pct => c.misinfo_pct,
            bot_pct => c.bot_pct,
            influencer_pct => c.influencer_pct,
            recs_per_step => c.recs_per_step,
            iterations => plan.iterations,
            seed => plan.base_seed,
            jobs => plan.jobs,
        }
        if let Some(out) = self.out {
            plan.out_dir = out;
        }
        plan.export_graph = self.export_graph;
        plan.validate()?;
        Ok(plan)
    }
}

/// Parses `argv` (including the program name) into a validated batch plan.
pub fn parse_cli<I, T>(argv: I) -> Result<BatchPlan>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv)
        .map_err(|e| Error::Usage(e.to_string()))?
        .into_plan()
}
