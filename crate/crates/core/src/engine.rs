//! The per-step simulation loop.
//!
//! Each step runs, in order: activation, recommendation against a frozen
//! snapshot, feed assembly, agent actions, commit of new engagements and
//! content, epidemic state updates, and metric collection.
//!
//! Active agents scan what was delivered to their feed this step (last
//! step's shares and this step's recommendations, at most `feed_cap` items).
//! Older feed items are not rescanned, but they still count as exposure
//! until pushed out of the feed. Every random draw
//! comes from a substream addressed by `(seed, purpose, step, agent)`, so
//! results do not depend on evaluation order.

use rand::Rng;

use crate::content::{authored_item, seed_catalog, ContentCatalog};
use crate::domain::{
    AgentId, AgentKind, AgentProfile, ContentId, ContentItem, EpidemicState, InteractionKind,
    InteractionRecord, Purpose, RandomSource, SimulationConfig, Step,
};
use crate::error::{Error, Result};
use crate::metrics::{self, StepMetricsRow};
use crate::netgen::{generate_world, SocialGraph};
use crate::recsys::{build_recommender, recommend_random, InteractionLog, RecContext, Recommender};

/// Activation check. On a peak offset the probability doubles (capped at 1);
/// bots always use their base rate.
pub fn is_active<R: Rng + ?Sized>(
    agent: &AgentProfile,
    step: Step,
    steps_per_day: u32,
    rng: &mut R,
) -> bool {
    let p = if agent.kind != AgentKind::Bot && agent.is_peak(step, steps_per_day) {
        (2.0 * agent.activity_prob).min(1.0)
    } else {
        agent.activity_prob
    };
    rng.random::<f64>() < p
}

/// Prepends `incoming` to `feed` (newest first), dropping later duplicates and
/// truncating to `cap`. Returns how many items at the head of the feed came
/// from `incoming`.
pub fn assemble_feed(feed: &mut Vec<ContentId>, incoming: &[ContentId], cap: usize) -> usize {
    if incoming.is_empty() {
        feed.truncate(cap);
        return 0;
    }
    let mut next = Vec::with_capacity(cap.min(incoming.len() + feed.len()));
    for &id in incoming {
        if next.len() == cap {
            break;
        }
        if !next.contains(&id) {
            next.push(id);
        }
    }
    let fresh = next.len();
    for &id in feed.iter() {
        if next.len() == cap {
            break;
        }
        if !next[..fresh].contains(&id) {
            next.push(id);
        }
    }
    *feed = next;
    fresh
}

/// Applies one step's epidemic transition to `agent`.
///
/// Infected agents are reconsidered once `recovery_window` steps have passed
/// since infection, dropping to exposed or susceptible depending on whether
/// the feed still holds fake items. Engaging a fake item infects immediately.
/// Otherwise a fake item in the feed means exposed and none means susceptible.
pub fn update_state(
    agent: &mut AgentProfile,
    step: Step,
    feed_has_fake: bool,
    engaged_fake: bool,
    recovery_window: u32,
) -> EpidemicState {
    use EpidemicState::*;
    if let (Infected, Some(since)) = (agent.state, agent.infected_since) {
        if step.saturating_sub(since) >= recovery_window {
            agent.state = if feed_has_fake { Exposed } else { Susceptible };
            agent.infected_since = None;
        }
    }
    if agent.state != Infected {
        if engaged_fake {
            agent.state = Infected;
            agent.infected_since = Some(step);
        } else {
            agent.state = if feed_has_fake { Exposed } else { Susceptible };
        }
    }
    agent.state
}

/// The agent's top-N list for the context's step, falling back to random
/// recommendations for cold-start agents when the strategy needs history.
pub fn recommend_for(
    recommender: &dyn Recommender,
    config: &SimulationConfig,
    ctx: &RecContext<'_>,
    agent: AgentId,
) -> Vec<ContentId> {
    let n = config.recs_per_step;
    let mut rng = RandomSource::substream(config.rng_seed, Purpose::Recommend, ctx.step, agent);
    let cold = recommender.needs_history()
        && ctx.matrix.engagement_count(agent) < config.cold_start_min_interactions;
    if cold {
        recommend_random(ctx, agent, n, &mut rng)
    } else {
        recommender.recommend(ctx, agent, n, &mut rng)
    }
}

/// One active agent's turn: roll engagement on each of the first `fresh`
/// feed items (the ones delivered this step, skipping own and already engaged
/// items), then maybe author an item. Nothing is committed here.
pub fn act(
    agent: &AgentProfile,
    fresh: usize,
    step: Step,
    catalog: &ContentCatalog,
    log: &InteractionLog,
    config: &SimulationConfig,
    rng: &mut RandomSource,
) -> Action {
    let params = config.kind_params(agent.kind);
    let mut action = Action::default();
    for &id in agent.feed.iter().take(fresh.min(config.feed_cap)) {
        let item = catalog.item(id);
        if item.author == Some(agent.id) || log.has_engaged(agent.id, id) {
            continue;
        }
        action.viewed.push(id);
        let p = catalog
            .interaction_probability(agent, id, step, params.fake_share_factor)
            .expect("feed items exist and are not from the future");
        if rng.random::<f64>() < p {
            action.engaged.push(id);
        }
    }
    if rng.random::<f64>() < agent.post_prob {
        let is_fake = rng.random::<f64>() < agent.post_misinfo_prob;
        action.authored = Some(authored_item(
            0,
            agent,
            is_fake,
            step,
            config.authored_topic_noise,
            rng,
        ));
    }
    action
}

/// What one active agent did in a step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Action {
    pub engaged: Vec<ContentId>,
    pub viewed: Vec<ContentId>,
    /// Newly authored item; its id is assigned at commit.
    pub authored: Option<ContentItem>,
}

/// Per-step recommendation record: every agent that received a list, ascending id.
pub type RecommendationRecord = Vec<(AgentId, Vec<ContentId>)>;

pub struct SimulationModel {
    config: SimulationConfig,
    agents: Vec<AgentProfile>,
    graph: SocialGraph,
    catalog: ContentCatalog,
    log: InteractionLog,
    recommender: Box<dyn Recommender>,
    step: Step,
    /// Items shared last step, waiting for delivery to each follower.
    pending: Vec<Vec<ContentId>>,
    last_recommendations: RecommendationRecord,
}

impl std::fmt::Debug for SimulationModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimulationModel")
            .field("algorithm", &self.config.algorithm)
            .field("step", &self.step)
            .field("agents", &self.agents.len())
            .field("contents", &self.catalog.len())
            .finish()
    }
}

impl SimulationModel {
    /// Validates the config and generates agents, graph and catalog from its world seed.
    pub fn new(config: SimulationConfig) -> Result<Self> {
        let violations = config.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidConfig(violations));
        }
        let (agents, graph) = generate_world(&config)?;
        let catalog = seed_catalog(
            &config,
            &mut RandomSource::substream(config.world_seed(), Purpose::Catalog, 0, 0),
        )?;
        Self::from_parts(config, agents, graph, catalog)
    }

    /// Assembles a model from explicit parts.
    pub fn from_parts(
        config: SimulationConfig,
        agents: Vec<AgentProfile>,
        graph: SocialGraph,
        catalog: ContentCatalog,
    ) -> Result<Self> {
        if graph.n() != agents.len() {
            return Err(Error::invalid(format!(
                "graph has {} nodes for {} agents",
                graph.n(),
                agents.len()
            )));
        }
        if agents.iter().enumerate().any(|(i, a)| a.id as usize != i) {
            return Err(Error::invalid("agent ids must be dense and ordered"));
        }
        let n = agents.len();
        Ok(SimulationModel {
            recommender: build_recommender(config.algorithm),
            log: InteractionLog::new(n),
            pending: vec![Vec::new(); n],
            last_recommendations: Vec::new(),
            config,
            agents,
            graph,
            catalog,
            step: 0,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn agents(&self) -> &[AgentProfile] {
        &self.agents
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn catalog(&self) -> &ContentCatalog {
        &self.catalog
    }

    pub fn log(&self) -> &InteractionLog {
        &self.log
    }

    /// Last completed step (0 before the first).
    pub fn step(&self) -> Step {
        self.step
    }

    pub fn last_recommendations(&self) -> &RecommendationRecord {
        &self.last_recommendations
    }

    /// Runs `steps` more steps and returns their metric rows.
    pub fn run_for(&mut self, steps: u32) -> Vec<StepMetricsRow> {
        (0..steps).map(|_| self.step_once()).collect()
    }

    fn substream(&self, purpose: Purpose, step: Step, agent: AgentId) -> RandomSource {
        RandomSource::substream(self.config.rng_seed, purpose, step, agent)
    }

    /// Advances one step and returns its metrics.
    pub fn step_once(&mut self) -> StepMetricsRow {
        let step = self.step + 1;
        let n = self.agents.len();

        // Recommendations against the snapshot at the end of the previous step.
        let active: Vec<bool> = self
            .agents
            .iter()
            .map(|a| {
                let mut rng = self.substream(Purpose::Activity, step, a.id);
                is_active(a, step, self.config.steps_per_day, &mut rng)
            })
            .collect();
        let recommendations: RecommendationRecord = {
            let ctx = RecContext::new(step, &self.agents, &self.catalog, self.log.matrix(), &self.config);
            self.recommender.prepare(&ctx);
            (0..n as AgentId)
                .filter(|&a| active[a as usize])
                .map(|a| (a, recommend_for(self.recommender.as_ref(), &self.config, &ctx, a)))
                .collect()
        };
        let mrd = metrics::mrd(recommendations.iter().flat_map(|(_, l)| l), &self.catalog);
        let mc = metrics::mc(&recommendations, &self.catalog);

        // Feeds: last step's shares first, then this step's recommendations.
        let mut recs_iter = recommendations.iter().peekable();
        let mut fresh = vec![0usize; n];
        for agent in self.agents.iter_mut() {
            let mut incoming = std::mem::take(&mut self.pending[agent.id as usize]);
            if let Some((_, list)) = recs_iter.next_if(|(a, _)| *a == agent.id) {
                incoming.extend_from_slice(list);
            }
            fresh[agent.id as usize] = assemble_feed(&mut agent.feed, &incoming, self.config.feed_cap);
            incoming.clear();
            self.pending[agent.id as usize] = incoming;
        }

        // Actions, in ascending agent id.
        let mut actions: Vec<(AgentId, Action)> = Vec::new();
        for agent in self.agents.iter().filter(|a| active[a.id as usize]) {
            let mut rng = self.substream(Purpose::Act, step, agent.id);
            let action = act(
                agent,
                fresh[agent.id as usize],
                step,
                &self.catalog,
                &self.log,
                &self.config,
                &mut rng,
            );
            actions.push((agent.id, action));
        }

        // Commit: views, engagements, new content, and shares for next step.
        let mut engaged_fake = vec![false; n];
        let mut engages = 0;
        for (agent, action) in actions.iter_mut() {
            for &content in &action.viewed {
                self.log.append(InteractionRecord {
                    agent: *agent,
                    content,
                    step,
                    kind: InteractionKind::View,
                });
            }
            let mut shared = Vec::with_capacity(action.engaged.len() + 1);
            for &content in &action.engaged {
                let fresh = self.log.append(InteractionRecord {
                    agent: *agent,
                    content,
                    step,
                    kind: InteractionKind::Engage,
                });
                if fresh {
                    engages += 1;
                    self.catalog.record_engage(content, step);
                    engaged_fake[*agent as usize] |= self.catalog.item(content).is_fake;
                    shared.push(content);
                }
            }
            if let Some(mut item) = action.authored.take() {
                item.id = self.catalog.next_id();
                let id = self.catalog.push(item).expect("dense id");
                shared.push(id);
            }
            for &follower in self.graph.followers(*agent) {
                self.pending[follower as usize].extend_from_slice(&shared);
            }
        }

        for agent in self.agents.iter_mut() {
            let has_fake = agent.feed.iter().any(|&i| self.catalog.item(i).is_fake);
            update_state(
                agent,
                step,
                has_fake,
                engaged_fake[agent.id as usize],
                self.config.infection_recovery_window,
            );
        }
        self.step = step;
        self.last_recommendations = recommendations;

        #[cfg(debug_assertions)]
        for a in &self.agents {
            if let Err(e) = a.check_invariants(self.config.feed_cap) {
                panic!("invariant violated after step {step}: {e}");
            }
        }

        let count = |s| self.agents.iter().filter(|a| a.state == s).count();
        let n_infected = count(EpidemicState::Infected);
        StepMetricsRow {
            step,
            n_susceptible: count(EpidemicState::Susceptible),
            n_exposed: count(EpidemicState::Exposed),
            n_infected,
            msp: metrics::msp_from_counts(n_infected, n),
            mrd,
            mc,
            n_contents: self.catalog.len(),
            n_fake_contents: self.catalog.fake_count(),
            n_interactions_step: engages,
        }
    }
}

/// Builds a model from `config` and runs it for `config.timesteps` steps.
pub fn run(config: SimulationConfig) -> Result<(SimulationModel, Vec<StepMetricsRow>)> {
    let steps = config.timesteps;
    let mut model = SimulationModel::new(config)?;
    let rows = model.run_for(steps);
    Ok((model, rows))
}
