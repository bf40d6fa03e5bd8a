//! Core value types shared by every other module.

pub mod config;
pub mod rng;

use serde::{Deserialize, Serialize};

pub use config::{validate_config, Algorithm, KindParams, SimulationConfig, Violation};
pub use rng::{sample_unit_vector, Purpose, RandomSource};

pub type AgentId = u32;
pub type ContentId = u32;
pub type Step = u32;

/// Initial engagement of a real item.
pub const REAL_INITIAL_ENGAGEMENT: f64 = 1.0;
/// Initial engagement of a fake item.
pub const FAKE_INITIAL_ENGAGEMENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Regular,
    Bot,
    Influencer,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Regular, AgentKind::Bot, AgentKind::Influencer];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Regular => "regular",
            AgentKind::Bot => "bot",
            AgentKind::Influencer => "influencer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpidemicState {
    Susceptible,
    Exposed,
    Infected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub id: AgentId,
    pub kind: AgentKind,
    pub activity_prob: f64,
    pub naivety: f64,
    pub credibility: f64,
    pub post_prob: f64,
    pub post_misinfo_prob: f64,
    /// Unit-norm preference over the topic space.
    pub preference: Vec<f64>,
    /// Step-of-day offsets with doubled activity. Empty for bots.
    pub peak_steps: Vec<u32>,
    pub state: EpidemicState,
    /// Set exactly while `state == Infected`.
    pub infected_since: Option<Step>,
    /// Newest first, at most `feed_cap` long.
    pub feed: Vec<ContentId>,
}

impl AgentProfile {
    /// Credibility derived from naivety: `1 - 0.5 * naivety`, clamped to (0, 1].
    pub fn credibility_for(naivety: f64) -> f64 {
        (1.0 - 0.5 * naivety).clamp(f64::MIN_POSITIVE, 1.0)
    }

    pub fn is_peak(&self, step: Step, steps_per_day: u32) -> bool {
        self.peak_steps.contains(&(step % steps_per_day))
    }

    /// Checks the per-agent invariants. Returns a description of the first failure.
    pub fn check_invariants(&self, feed_cap: usize) -> Result<(), String> {
        let norm = rng::l2_norm(&self.preference);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(format!("agent {}: preference norm {norm}", self.id));
        }
        for (name, v) in [
            ("activity_prob", self.activity_prob),
            ("naivety", self.naivety),
            ("credibility", self.credibility),
            ("post_prob", self.post_prob),
            ("post_misinfo_prob", self.post_misinfo_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("agent {}: {name}={v} outside [0,1]", self.id));
            }
        }
        if self.kind == AgentKind::Regular && !(1..=3).contains(&self.peak_steps.len()) {
            return Err(format!(
                "agent {}: regular agent with {} peaks",
                self.id,
                self.peak_steps.len()
            ));
        }
        if (self.state == EpidemicState::Infected) != self.infected_since.is_some() {
            return Err(format!(
                "agent {}: state {:?} with infected_since {:?}",
                self.id, self.state, self.infected_since
            ));
        }
        if self.feed.len() > feed_cap {
            return Err(format!("agent {}: feed length {}", self.id, self.feed.len()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentItem {
    pub id: ContentId,
    pub is_fake: bool,
    /// Unit-norm topic vector.
    pub topic: Vec<f64>,
    pub initial_engagement: f64,
    pub creation_step: Step,
    pub author: Option<AgentId>,
}

impl ContentItem {
    pub fn new(
        id: ContentId,
        is_fake: bool,
        topic: Vec<f64>,
        creation_step: Step,
        author: Option<AgentId>,
    ) -> Self {
        ContentItem {
            id,
            is_fake,
            topic,
            initial_engagement: if is_fake {
                FAKE_INITIAL_ENGAGEMENT
            } else {
                REAL_INITIAL_ENGAGEMENT
            },
            creation_step,
            author,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    View,
    /// Share or like. The only kind that counts as engagement.
    Engage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub agent: AgentId,
    pub content: ContentId,
    pub step: Step,
    pub kind: InteractionKind,
}
