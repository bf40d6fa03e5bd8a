//! Content catalog, engagement decay, and per-agent evaluation.

use rand::seq::index;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::rng::normalized;
use crate::domain::{
    sample_unit_vector, AgentId, AgentProfile, ContentId, ContentItem, RandomSource,
    SimulationConfig, Step,
};
use crate::error::{Error, Result};
use crate::netgen::unit_dot;

/// Upper bound on the engagement factor inside an evaluation.
pub const ENGAGEMENT_CAP: f64 = 1.5;

/// Decay and re-excitation parameters for engagement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementModel {
    pub decay: f64,
    pub bump: f64,
}

impl EngagementModel {
    pub fn from_config(c: &SimulationConfig) -> Self {
        EngagementModel {
            decay: c.engagement_decay,
            bump: c.engagement_bump,
        }
    }
}

impl Default for EngagementModel {
    fn default() -> Self {
        EngagementModel {
            decay: 0.1,
            bump: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
struct ItemActivity {
    /// Steps of engage events, nondecreasing.
    events: Vec<Step>,
    /// Decayed bump total as of `acc_step`.
    acc_value: f64,
    acc_step: Step,
}

/// Every item of a run, by id, with its engagement history.
#[derive(Debug, Clone)]
pub struct ContentCatalog {
    items: Vec<ContentItem>,
    activity: Vec<ItemActivity>,
    fake_count: usize,
    model: EngagementModel,
}

impl ContentCatalog {
    pub fn new(model: EngagementModel) -> Self {
        ContentCatalog {
            items: Vec::new(),
            activity: Vec::new(),
            fake_count: 0,
            model,
        }
    }

    pub fn model(&self) -> EngagementModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn fake_count(&self) -> usize {
        self.fake_count
    }

    pub fn fake_fraction(&self) -> f64 {
        if self.items.is_empty() {
            0.0
        } else {
            self.fake_count as f64 / self.items.len() as f64
        }
    }

    pub fn items(&self) -> &[ContentItem] {
        &self.items
    }

    pub fn get(&self, id: ContentId) -> Option<&ContentItem> {
        self.items.get(id as usize)
    }

    pub fn item(&self, id: ContentId) -> &ContentItem {
        &self.items[id as usize]
    }

    pub fn next_id(&self) -> ContentId {
        self.items.len() as ContentId
    }

    /// Appends an item. Its id must equal the next free id.
    pub fn push(&mut self, item: ContentItem) -> Result<ContentId> {
        if item.id != self.next_id() {
            return Err(Error::invalid(format!(
                "item id {} is not the next id {}",
                item.id,
                self.next_id()
            )));
        }
        if item.is_fake {
            self.fake_count += 1;
        }
        self.activity.push(ItemActivity {
            events: Vec::new(),
            acc_value: 0.0,
            acc_step: item.creation_step,
        });
        self.items.push(item);
        Ok(self.next_id() - 1)
    }

    /// Records an engage event. Steps must be nondecreasing per item.
    pub fn record_engage(&mut self, id: ContentId, step: Step) {
        let model = self.model;
        let a = &mut self.activity[id as usize];
        debug_assert!(a.events.last().is_none_or(|&s| s <= step));
        let elapsed = step.saturating_sub(a.acc_step) as f64;
        a.acc_value = a.acc_value * (-model.decay * elapsed).exp() + model.bump;
        a.acc_step = step;
        a.events.push(step);
    }

    /// Engage events on `id` at steps in `[from, to]`.
    pub fn engage_count(&self, id: ContentId, from: Step, to: Step) -> usize {
        let events = &self.activity[id as usize].events;
        let lo = events.partition_point(|&s| s < from);
        let hi = events.partition_point(|&s| s <= to);
        hi.saturating_sub(lo)
    }

    pub fn total_engagements(&self, id: ContentId) -> usize {
        self.activity[id as usize].events.len()
    }

    /// Current engagement: the decayed initial value plus a decayed bump per
    /// engage event at or before `step`.
    pub fn engagement(&self, id: ContentId, step: Step) -> Result<f64> {
        let item = self
            .get(id)
            .ok_or_else(|| Error::invalid(format!("unknown content id {id}")))?;
        if step < item.creation_step {
            return Err(Error::invalid(format!(
                "step {step} precedes creation step {} of item {id}",
                item.creation_step
            )));
        }
        let d = self.model.decay;
        let base = item.initial_engagement * (-d * (step - item.creation_step) as f64).exp();
        let a = &self.activity[id as usize];
        let bumps = if step >= a.acc_step {
            a.acc_value * (-d * (step - a.acc_step) as f64).exp()
        } else {
            a.events
                .iter()
                .take_while(|&&s| s <= step)
                .map(|&s| self.model.bump * (-d * (step - s) as f64).exp())
                .sum()
        };
        Ok(base + bumps)
    }

    /// Evaluation score of `id` for `agent` at `step`.
    pub fn evaluate(&self, agent: &AgentProfile, id: ContentId, step: Step) -> Result<f64> {
        let e = self.engagement(id, step)?;
        Ok(evaluate(agent, self.item(id), e))
    }

    pub fn interaction_probability(
        &self,
        agent: &AgentProfile,
        id: ContentId,
        step: Step,
        fake_share_factor: f64,
    ) -> Result<f64> {
        let e = self.engagement(id, step)?;
        Ok(interaction_probability(
            agent,
            self.item(id),
            e,
            fake_share_factor,
        ))
    }
}

/// `max(cos, 0) * credibility * min(engagement, 1.5)`, in `[0, 1.5]`.
pub fn evaluate(agent: &AgentProfile, item: &ContentItem, engagement: f64) -> f64 {
    let similarity = unit_dot(&agent.preference, &item.topic).max(0.0);
    similarity * agent.credibility * engagement.min(ENGAGEMENT_CAP)
}

/// Probability that `agent` engages `item` on one scan.
///
/// Real items: `evaluate / 1.5`. Fake items are additionally scaled by
/// `(0.5 + naivety) * fake_share_factor`. Clamped to `[0, 1]`.
pub fn interaction_probability(
    agent: &AgentProfile,
    item: &ContentItem,
    engagement: f64,
    fake_share_factor: f64,
) -> f64 {
    let base = evaluate(agent, item, engagement) / ENGAGEMENT_CAP;
    let m = if item.is_fake {
        (0.5 + agent.naivety) * fake_share_factor
    } else {
        1.0
    };
    (base * m).clamp(0.0, 1.0)
}

/// Initial pool: `initial_news` items at step 0, `round(initial_news * misinfo_pct)` fake.
pub fn seed_catalog(config: &SimulationConfig, rng: &mut RandomSource) -> Result<ContentCatalog> {
    let n = config.initial_news as usize;
    let n_fake = ((n as f64 * config.misinfo_pct).round() as usize).min(n);
    let mut is_fake = vec![false; n];
    for i in index::sample(rng, n, n_fake) {
        is_fake[i] = true;
    }
    let mut catalog = ContentCatalog::new(EngagementModel::from_config(config));
    for (id, fake) in is_fake.into_iter().enumerate() {
        let topic = sample_unit_vector(config.topic_dim, rng)?;
        catalog.push(ContentItem::new(id as ContentId, fake, topic, 0, None))?;
    }
    Ok(catalog)
}

/// Topic of a freshly authored item: the author's preference plus Gaussian noise, renormalized.
pub fn authored_topic<R: RngCore + ?Sized>(preference: &[f64], noise: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = preference
            .iter()
            .map(|&p| {
                let z: f64 = StandardNormal.sample(rng);
                p + noise * z
            })
            .collect();
        if let Some(u) = normalized(v) {
            return u;
        }
    }
}

/// Convenience for building an authored item.
pub fn authored_item(
    id: ContentId,
    author: &AgentProfile,
    is_fake: bool,
    step: Step,
    noise: f64,
    rng: &mut RandomSource,
) -> ContentItem {
    let topic = authored_topic(&author.preference, noise, rng);
    ContentItem::new(id, is_fake, topic, step, Some(author.id as AgentId))
}
