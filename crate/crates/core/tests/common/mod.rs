//! Brute-force reference implementations and fixtures shared by the
//! integration tests. Everything here is written from the definitions, on
//! dense matrices, without touching the optimized code paths.

#![allow(dead_code)]

use std::cmp::Ordering;

use misinfo_abm::content::{ContentCatalog, EngagementModel};
use misinfo_abm::domain::{
    sample_unit_vector, AgentId, AgentKind, AgentProfile, ContentId, ContentItem, EpidemicState,
    RandomSource,
};
use misinfo_abm::recsys::InteractionMatrix;
use rand::Rng;

/// Dense binary user x item matrix.
#[derive(Debug, Clone)]
pub struct Dense {
    pub cells: Vec<Vec<bool>>,
    pub items: usize,
}

impl Dense {
    pub fn random(rng: &mut RandomSource, max_users: usize, max_items: usize) -> Self {
        let users = rng.random_range(1..=max_users);
        let items = rng.random_range(1..=max_items);
        let density = rng.random_range(0.05..0.7);
        let cells = (0..users)
            .map(|_| (0..items).map(|_| rng.random::<f64>() < density).collect())
            .collect();
        Dense { cells, items }
    }

    pub fn users(&self) -> usize {
        self.cells.len()
    }

    pub fn to_sparse(&self) -> InteractionMatrix {
        let pairs: Vec<(AgentId, ContentId)> = self
            .cells
            .iter()
            .enumerate()
            .flat_map(|(u, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &x)| x)
                    .map(move |(i, _)| (u as AgentId, i as ContentId))
            })
            .collect();
        InteractionMatrix::from_pairs(self.users(), &pairs)
    }

    fn row_len(&self, u: usize) -> usize {
        self.cells[u].iter().filter(|&&x| x).count()
    }

    fn col_len(&self, i: usize) -> usize {
        self.cells.iter().filter(|row| row[i]).count()
    }

    fn row_overlap(&self, u: usize, v: usize) -> usize {
        (0..self.items).filter(|&i| self.cells[u][i] && self.cells[v][i]).count()
    }

    fn col_overlap(&self, i: usize, j: usize) -> usize {
        self.cells.iter().filter(|row| row[i] && row[j]).count()
    }
}

/// Descending score, ascending id, with `-0.0 == 0.0`.
pub fn by_score_then_id(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
}

/// Exhaustive user-kNN scores: positive scores only, ascending item id.
pub fn oracle_user_knn_scores(m: &Dense, u: usize, k: usize) -> Vec<(usize, f64)> {
    let nu = m.row_len(u);
    if nu == 0 || k == 0 {
        return Vec::new();
    }
    let mut sims: Vec<(usize, f64)> = (0..m.users())
        .filter(|&v| v != u && m.row_len(v) > 0)
        .map(|v| {
            let s = m.row_overlap(u, v) as f64 / ((nu * m.row_len(v)) as f64).sqrt();
            (v, s)
        })
        .collect();
    sims.sort_by(by_score_then_id);
    sims.truncate(k);
    sims.sort_by_key(|&(v, _)| v);
    (0..m.items)
        .filter_map(|i| {
            let mut score = 0.0;
            for &(v, s) in &sims {
                if s > 0.0 && m.cells[v][i] {
                    score += s;
                }
            }
            (score > 0.0).then_some((i, score))
        })
        .collect()
}

/// Exhaustive item-kNN scores: positive scores only, ascending item id.
pub fn oracle_item_knn_scores(m: &Dense, u: usize, k: usize) -> Vec<(usize, f64)> {
    let neighbourhood = |c: usize| -> Vec<(usize, f64)> {
        let nc = m.col_len(c);
        if nc == 0 {
            return Vec::new();
        }
        let mut sims: Vec<(usize, f64)> = (0..m.items)
            .filter(|&j| j != c && m.col_len(j) > 0)
            .map(|j| {
                let s = m.col_overlap(c, j) as f64 / ((nc * m.col_len(j)) as f64).sqrt();
                (j, s)
            })
            .filter(|&(_, s)| s > 0.0)
            .collect();
        sims.sort_by(by_score_then_id);
        sims.truncate(k);
        sims
    };
    (0..m.items)
        .filter_map(|c| {
            let top = neighbourhood(c);
            let mut score = 0.0;
            for j in 0..m.items {
                if m.cells[u][j] {
                    if let Some(&(_, s)) = top.iter().find(|&&(x, _)| x == j) {
                        score += s;
                    }
                }
            }
            (score > 0.0).then_some((c, score))
        })
        .collect()
}

/// Rank eligible scored items and keep the first `n` ids.
pub fn oracle_rank(
    scores: &[(usize, f64)],
    eligible: impl Fn(usize) -> bool,
    n: usize,
) -> Vec<ContentId> {
    let mut v: Vec<(usize, f64)> = scores.iter().copied().filter(|&(i, _)| eligible(i)).collect();
    v.sort_by(by_score_then_id);
    v.into_iter().take(n).map(|(i, _)| i as ContentId).collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

pub fn agent(id: AgentId, kind: AgentKind, preference: Vec<f64>) -> AgentProfile {
    AgentProfile {
        id,
        kind,
        activity_prob: 0.5,
        naivety: 0.5,
        credibility: AgentProfile::credibility_for(0.5),
        post_prob: 0.0,
        post_misinfo_prob: 0.0,
        preference,
        peak_steps: if kind == AgentKind::Regular { vec![0] } else { vec![] },
        state: EpidemicState::Susceptible,
        infected_since: None,
        feed: Vec::new(),
    }
}

/// `n_agents` agents with random preferences in `dim` dimensions.
pub fn agents(rng: &mut RandomSource, n_agents: usize, dim: usize) -> Vec<AgentProfile> {
    (0..n_agents)
        .map(|id| agent(id as AgentId, AgentKind::Regular, sample_unit_vector(dim, rng).unwrap()))
        .collect()
}

/// Catalog of `n` items created at step 0 with random topics; roughly a
/// quarter fake, a few authored by agent 0.
pub fn catalog(rng: &mut RandomSource, n: usize, dim: usize) -> ContentCatalog {
    let mut c = ContentCatalog::new(EngagementModel::default());
    for id in 0..n {
        let fake = rng.random::<f64>() < 0.25;
        let author = (rng.random::<f64>() < 0.1).then_some(0);
        let topic = sample_unit_vector(dim, rng).unwrap();
        c.push(ContentItem::new(id as ContentId, fake, topic, 0, author)).unwrap();
    }
    c
}

/// Drives `update_state` through `inputs` (feed holds fake, engaged fake) from
/// a susceptible start and checks every transition. Returns the first problem.
pub fn check_sei_trace(inputs: &[(bool, bool)], window: u32) -> Result<(), String> {
    use misinfo_abm::engine::update_state;
    use EpidemicState::*;
    let mut a = agent(0, AgentKind::Regular, vec![1.0]);
    let mut ever_fake = false;
    for (t, &(feed_fake, engaged_fake)) in inputs.iter().enumerate() {
        let step = t as u32 + 1;
        let (before, since) = (a.state, a.infected_since);
        let after = update_state(&mut a, step, feed_fake, engaged_fake, window);
        ever_fake |= feed_fake || engaged_fake;
        let legal = matches!(
            (before, after),
            (Susceptible, Susceptible | Exposed | Infected)
                | (Exposed, Exposed | Infected | Susceptible)
                | (Infected, Infected | Exposed | Susceptible)
        );
        if !legal {
            return Err(format!("step {step}: {before:?} -> {after:?}"));
        }
        if before == Infected {
            let elapsed = step - since.expect("infected agents carry infected_since");
            let left = after != Infected || a.infected_since != since;
            if left && elapsed < window {
                return Err(format!("step {step}: left infection after {elapsed} steps"));
            }
        }
        if (after == Infected) != a.infected_since.is_some() {
            return Err(format!("step {step}: infected_since out of sync"));
        }
        if after == Infected && a.infected_since != since && a.infected_since != Some(step) {
            return Err(format!("step {step}: infected_since not set to the current step"));
        }
        if engaged_fake && after != Infected {
            return Err(format!("step {step}: engaged fake but {after:?}"));
        }
        if !ever_fake && after != Susceptible {
            return Err(format!("step {step}: {after:?} without any fake content"));
        }
    }
    Ok(())
}

/// A trace of `len` steps where fake content shows up with probability `p_feed`
/// and is engaged with probability `p_engage` when present.
pub fn random_sei_inputs(rng: &mut RandomSource, len: usize) -> Vec<(bool, bool)> {
    let p_feed = rng.random::<f64>();
    let p_engage = rng.random::<f64>() * 0.3;
    (0..len)
        .map(|_| {
            let feed = rng.random::<f64>() < p_feed;
            (feed, feed && rng.random::<f64>() < p_engage)
        })
        .collect()
}
