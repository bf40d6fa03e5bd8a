//! Misinformation spread (MSP), ratio difference (MRD) and count (MC).

use serde::{Deserialize, Serialize};

use crate::content::ContentCatalog;
use crate::domain::{AgentId, AgentProfile, Algorithm, ContentId, EpidemicState, Step};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMetricsRow {
    pub step: Step,
    pub n_susceptible: usize,
    pub n_exposed: usize,
    pub n_infected: usize,
    /// Percentage of infected agents.
    pub msp: f64,
    pub mrd: f64,
    pub mc: f64,
    pub n_contents: usize,
    pub n_fake_contents: usize,
    pub n_interactions_step: usize,
}

impl StepMetricsRow {
    pub fn population(&self) -> usize {
        self.n_susceptible + self.n_exposed + self.n_infected
    }
}

/// Percentage of agents in the infected state.
pub fn msp(agents: &[AgentProfile]) -> Result<f64> {
    if agents.is_empty() {
        return Err(Error::invalid("MSP of an empty population"));
    }
    let infected = agents
        .iter()
        .filter(|a| a.state == EpidemicState::Infected)
        .count();
    Ok(msp_from_counts(infected, agents.len()))
}

pub fn msp_from_counts(infected: usize, total: usize) -> f64 {
    100.0 * infected as f64 / total as f64
}

/// Fake fraction among the recommended multiset minus the fake fraction of
/// the catalog. Zero when nothing was recommended.
pub fn mrd<'a>(recommended: impl IntoIterator<Item = &'a ContentId>, catalog: &ContentCatalog) -> f64 {
    let (mut total, mut fake) = (0usize, 0usize);
    for &id in recommended {
        total += 1;
        if catalog.item(id).is_fake {
            fake += 1;
        }
    }
    if total == 0 {
        return 0.0;
    }
    fake as f64 / total as f64 - catalog.fake_fraction()
}

/// Mean number of fake items per agent that received recommendations.
pub fn mc(per_agent: &[(AgentId, Vec<ContentId>)], catalog: &ContentCatalog) -> f64 {
    if per_agent.is_empty() {
        return 0.0;
    }
    let fake: usize = per_agent
        .iter()
        .flat_map(|(_, list)| list)
        .filter(|&&id| catalog.item(id).is_fake)
        .count();
    fake as f64 / per_agent.len() as f64
}

/// Per-run averages, with ranks filled in once all algorithms are known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub iteration: u32,
    pub mean_msp: f64,
    pub mean_mrd: f64,
    pub mean_mc: f64,
    pub rank_msp: Option<usize>,
    pub rank_mrd: Option<usize>,
    pub rank_mc: Option<usize>,
}

pub fn summarize(rows: &[StepMetricsRow], algorithm: Algorithm, iteration: u32) -> RunSummary {
    let n = rows.len().max(1) as f64;
    let mean = |f: fn(&StepMetricsRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    RunSummary {
        algorithm,
        iteration,
        mean_msp: mean(|r| r.msp),
        mean_mrd: mean(|r| r.mrd),
        mean_mc: mean(|r| r.mc),
        rank_msp: None,
        rank_mrd: None,
        rank_mc: None,
    }
}

/// 1-based ranks, lowest value first; ties go to the earlier entry.
pub fn ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0; values.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        out[idx] = rank + 1;
    }
    out
}

/// Rank summaries against each other on every metric (1 = least misinformation).
pub fn assign_ranks(summaries: &mut [RunSummary]) {
    let msp: Vec<f64> = summaries.iter().map(|s| s.mean_msp).collect();
    let mrd: Vec<f64> = summaries.iter().map(|s| s.mean_mrd).collect();
    let mc: Vec<f64> = summaries.iter().map(|s| s.mean_mc).collect();
    let (rm, rd, rc) = (ranks(&msp), ranks(&mrd), ranks(&mc));
    for (i, s) in summaries.iter_mut().enumerate() {
        s.rank_msp = Some(rm[i]);
        s.rank_mrd = Some(rd[i]);
        s.rank_mc = Some(rc[i]);
    }
}

/// Mean of several iterations' summaries for one algorithm.
pub fn average_summaries(algorithm: Algorithm, runs: &[&RunSummary]) -> RunSummary {
    let n = runs.len().max(1) as f64;
    RunSummary {
        algorithm,
        iteration: 0,
        mean_msp: runs.iter().map(|s| s.mean_msp).sum::<f64>() / n,
        mean_mrd: runs.iter().map(|s| s.mean_mrd).sum::<f64>() / n,
        mean_mc: runs.iter().map(|s| s.mean_mc).sum::<f64>() / n,
        rank_msp: None,
        rank_mrd: None,
        rank_mc: None,
    }
}
