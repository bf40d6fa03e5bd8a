//! Agent population and follow-graph generation.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::domain::{
    sample_unit_vector, AgentId, AgentKind, AgentProfile, EpidemicState, Purpose, RandomSource,
    SimulationConfig,
};
use crate::error::{Error, Result};

/// Follow weights never drop below this, so every pair stays reachable.
pub const FOLLOW_WEIGHT_FLOOR: f64 = 0.01;

/// Create `n_users` agents: regulars first, then bots, then influencers.
///
/// Influencers get the most common regular peak offsets as their posting times.
pub fn generate_agents(config: &SimulationConfig, rng: &mut RandomSource) -> Result<Vec<AgentProfile>> {
    let (regular, bots, influencers) = config.kind_counts();
    let kinds = std::iter::repeat_n(AgentKind::Regular, regular)
        .chain(std::iter::repeat_n(AgentKind::Bot, bots))
        .chain(std::iter::repeat_n(AgentKind::Influencer, influencers));

    let mut agents = Vec::with_capacity(config.n_users as usize);
    for (id, kind) in kinds.enumerate() {
        let params = config.kind_params(kind);
        let activity_prob = uniform(rng, params.activity);
        let naivety = uniform(rng, params.naivety);
        let preference = sample_unit_vector(config.topic_dim, rng)?;
        let peak_steps = match kind {
            AgentKind::Regular => {
                let count = rng.random_range(1..=3usize).min(config.steps_per_day as usize);
                let mut offsets =
                    rand::seq::index::sample(rng, config.steps_per_day as usize, count)
                        .into_iter()
                        .map(|o| o as u32)
                        .collect::<Vec<_>>();
                offsets.sort_unstable();
                offsets
            }
            _ => Vec::new(),
        };
        agents.push(AgentProfile {
            id: id as AgentId,
            kind,
            activity_prob,
            naivety,
            credibility: AgentProfile::credibility_for(naivety),
            post_prob: params.post_prob,
            post_misinfo_prob: params.post_misinfo_prob,
            preference,
            peak_steps,
            state: EpidemicState::Susceptible,
            infected_since: None,
            feed: Vec::new(),
        });
    }

    let strategic = busiest_offsets(&agents, config.steps_per_day, 3);
    for a in agents.iter_mut().filter(|a| a.kind == AgentKind::Influencer) {
        a.peak_steps = strategic.clone();
    }
    Ok(agents)
}

fn uniform(rng: &mut RandomSource, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// The `count` most frequent peak offsets among regular agents, ties by lower offset.
fn busiest_offsets(agents: &[AgentProfile], steps_per_day: u32, count: usize) -> Vec<u32> {
    let mut tally = vec![0usize; steps_per_day as usize];
    for a in agents.iter().filter(|a| a.kind == AgentKind::Regular) {
        for &p in &a.peak_steps {
            tally[p as usize] += 1;
        }
    }
    let mut order: Vec<u32> = (0..steps_per_day).collect();
    order.sort_by(|&a, &b| tally[b as usize].cmp(&tally[a as usize]).then(a.cmp(&b)));
    order.truncate(count.min(steps_per_day as usize));
    order.sort_unstable();
    order
}

/// Cosine similarity. Errors on mismatched dimensions or a zero vector.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::invalid("cosine similarity of a zero vector"));
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Dot product of two vectors already known to be unit-norm.
#[inline]
pub(crate) fn unit_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Directed follow graph. An edge `u -> v` means `u` follows `v`,
/// so whatever `v` shares reaches `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    followees: Vec<Vec<AgentId>>,
    followers: Vec<Vec<AgentId>>,
}

impl SocialGraph {
    /// Builds a graph from `(follower, followee)` pairs, rejecting self-loops,
    /// duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(AgentId, AgentId)]) -> Result<Self> {
        let mut followees = vec![Vec::new(); n];
        let mut followers = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!("edge {u}->{v} out of range for n={n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on {u}")));
            }
            if followees[u as usize].contains(&v) {
                return Err(Error::invalid(format!("duplicate edge {u}->{v}")));
            }
            followees[u as usize].push(v);
            followers[v as usize].push(u);
        }
        for list in followees.iter_mut().chain(followers.iter_mut()) {
            list.sort_unstable();
        }
        Ok(SocialGraph {
            followees,
            followers,
        })
    }

    pub fn n(&self) -> usize {
        self.followees.len()
    }

    pub fn followees(&self, u: AgentId) -> &[AgentId] {
        &self.followees[u as usize]
    }

    pub fn followers(&self, v: AgentId) -> &[AgentId] {
        &self.followers[v as usize]
    }

    pub fn in_degree(&self, v: AgentId) -> usize {
        self.followers[v as usize].len()
    }

    pub fn edge_count(&self) -> usize {
        self.followees.iter().map(Vec::len).sum()
    }

    pub fn follows(&self, u: AgentId, v: AgentId) -> bool {
        self.followees[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as `(follower, followee)`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.followees
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u as AgentId, v)))
    }

    /// Edge-list text: one `follower followee` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn mean_in_degree(&self, agents: &[AgentProfile], kind: AgentKind) -> f64 {
        let degrees: Vec<usize> = agents
            .iter()
            .filter(|a| a.kind == kind)
            .map(|a| self.in_degree(a.id))
            .collect();
        if degrees.is_empty() {
            0.0
        } else {
            degrees.iter().sum::<usize>() as f64 / degrees.len() as f64
        }
    }
}

/// Follow weight of `v` as seen by `u`.
pub fn follow_weight(u: &AgentProfile, v: &AgentProfile, config: &SimulationConfig) -> f64 {
    let sim = unit_dot(&u.preference, &v.preference);
    sim.max(FOLLOW_WEIGHT_FLOOR) * config.kind_params(v.kind).follow_boost
}

/// Each agent draws a Poisson out-degree (clamped to `[1, n-1]`) and picks that
/// many distinct followees by weighted sampling without replacement.
pub fn generate_graph(
    agents: &[AgentProfile],
    config: &SimulationConfig,
    rng: &mut RandomSource,
) -> Result<SocialGraph> {
    let n = agents.len();
    if n < 2 {
        return Err(Error::invalid(format!("graph needs at least 2 agents, got {n}")));
    }
    let poisson = Poisson::new(config.avg_followers)
        .map_err(|e| Error::invalid(format!("avg_followers: {e}")))?;

    let mut edges = Vec::new();
    let mut keyed: Vec<(f64, AgentId)> = Vec::with_capacity(n);
    for u in agents {
        let degree = (poisson.sample(rng) as usize).clamp(1, n - 1);
        // Efraimidis-Spirakis: the `degree` largest ln(U)/w keys form a weighted
        // sample without replacement.
        keyed.clear();
        for v in agents.iter().filter(|v| v.id != u.id) {
            let w = follow_weight(u, v, config);
            let r: f64 = rng.random::<f64>();
            let key = (1.0 - r).ln() / w;
            keyed.push((key, v.id));
        }
        keyed.select_nth_unstable_by(degree - 1, |a, b| {
            b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
        });
        edges.extend(keyed[..degree].iter().map(|&(_, v)| (u.id, v)));
    }
    SocialGraph::from_edges(n, &edges)
}

/// Convenience: population and graph from the config's world seed.
pub fn generate_world(config: &SimulationConfig) -> Result<(Vec<AgentProfile>, SocialGraph)> {
    let seed = config.world_seed();
    let agents = generate_agents(config, &mut RandomSource::substream(seed, Purpose::Agents, 0, 0))?;
    let graph = generate_graph(
        &agents,
        config,
        &mut RandomSource::substream(seed, Purpose::Graph, 0, 0),
    )?;
    Ok((agents, graph))
}
