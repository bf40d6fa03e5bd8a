use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AgentKind;
use crate::error::Error;

/// Recommendation strategy driving the per-step top-N lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Random,
    Popularity,
    UserKnn,
    ItemKnn,
    ContentBased,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Random,
        Algorithm::Popularity,
        Algorithm::UserKnn,
        Algorithm::ItemKnn,
        Algorithm::ContentBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Random => "random",
            Algorithm::Popularity => "popularity",
            Algorithm::UserKnn => "user_knn",
            Algorithm::ItemKnn => "item_knn",
            Algorithm::ContentBased => "content_based",
        }
    }

    /// Stable index used for seed derivation. Never reorder.
    pub fn index(self) -> u64 {
        match self {
            Algorithm::Random => 0,
            Algorithm::Popularity => 1,
            Algorithm::UserKnn => 2,
            Algorithm::ItemKnn => 3,
            Algorithm::ContentBased => 4,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown algorithm `{s}` (expected one of random, popularity, user_knn, item_knn, content_based)"
                ))
            })
    }
}

/// Behavioural parameters for one agent kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindParams {
    /// Uniform range for the per-step activity probability.
    pub activity: (f64, f64),
    /// Uniform range for naivety.
    pub naivety: (f64, f64),
    /// Probability of authoring an item on an active step.
    pub post_prob: f64,
    /// Probability that an authored item is fake.
    pub post_misinfo_prob: f64,
    /// Multiplier on the interaction probability for fake items.
    pub fake_share_factor: f64,
    /// Multiplier on the follow weight when this kind is the followee.
    pub follow_boost: f64,
}

impl KindParams {
    pub fn regular() -> Self {
        KindParams {
            activity: (0.1, 0.7),
            naivety: (0.3, 0.6),
            post_prob: 0.05,
            post_misinfo_prob: 0.10,
            fake_share_factor: 1.0,
            follow_boost: 1.0,
        }
    }

    pub fn bot() -> Self {
        KindParams {
            activity: (0.4, 0.9),
            naivety: (0.6, 0.9),
            post_prob: 0.15,
            post_misinfo_prob: 0.60,
            fake_share_factor: 2.0,
            follow_boost: 0.5,
        }
    }

    pub fn influencer() -> Self {
        KindParams {
            activity: (0.3, 0.8),
            naivety: (0.3, 0.6),
            post_prob: 0.10,
            post_misinfo_prob: 0.02,
            fake_share_factor: 0.3,
            follow_boost: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub timesteps: u32,
    pub n_users: u32,
    pub avg_followers: f64,
    pub initial_news: u32,
    pub misinfo_pct: f64,
    pub bot_pct: f64,
    pub influencer_pct: f64,
    pub recs_per_step: usize,

    pub topic_dim: usize,
    pub feed_cap: usize,
    pub steps_per_day: u32,
    pub infection_recovery_window: u32,
    pub knn_neighbors: usize,
    pub popularity_window: u32,
    pub cold_start_min_interactions: usize,
    /// Exponential decay rate of content engagement per step.
    pub engagement_decay: f64,
    /// Additive engagement contributed by each engage event (decays at the same rate).
    pub engagement_bump: f64,
    /// Noise scale applied to an author's preference when drawing a new item's topic.
    pub authored_topic_noise: f64,

    /// Seed for the per-step dynamics.
    pub rng_seed: u64,
    /// Seed for the initial population, graph and catalog. Falls back to `rng_seed`.
    pub world_seed: Option<u64>,
    pub algorithm: Algorithm,

    pub regular: KindParams,
    pub bot: KindParams,
    pub influencer: KindParams,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            timesteps: 600,
            n_users: 200,
            avg_followers: 6.0,
            initial_news: 400,
            misinfo_pct: 0.10,
            bot_pct: 0.07,
            influencer_pct: 0.03,
            recs_per_step: 10,
            topic_dim: 16,
            feed_cap: 50,
            steps_per_day: 24,
            infection_recovery_window: 40,
            knn_neighbors: 20,
            popularity_window: 20,
            cold_start_min_interactions: 3,
            engagement_decay: 0.1,
            engagement_bump: 0.1,
            authored_topic_noise: 0.25,
            rng_seed: 0,
            world_seed: None,
            algorithm: Algorithm::Random,
            regular: KindParams::regular(),
            bot: KindParams::bot(),
            influencer: KindParams::influencer(),
        }
    }
}

/// Largest step count addressable by the per-step random substreams.
pub const MAX_TIMESTEPS: u32 = (1 << 24) - 1;

impl SimulationConfig {
    pub fn kind_params(&self, kind: AgentKind) -> &KindParams {
        match kind {
            AgentKind::Regular => &self.regular,
            AgentKind::Bot => &self.bot,
            AgentKind::Influencer => &self.influencer,
        }
    }

    pub fn kind_params_mut(&mut self, kind: AgentKind) -> &mut KindParams {
        match kind {
            AgentKind::Regular => &mut self.regular,
            AgentKind::Bot => &mut self.bot,
            AgentKind::Influencer => &mut self.influencer,
        }
    }

    pub fn world_seed(&self) -> u64 {
        self.world_seed.unwrap_or(self.rng_seed)
    }

    /// Agent counts per kind: bots and influencers are rounded, regulars absorb the remainder.
    pub fn kind_counts(&self) -> (usize, usize, usize) {
        let n = self.n_users as usize;
        let bots = (n as f64 * self.bot_pct).round() as usize;
        let influencers = (n as f64 * self.influencer_pct).round() as usize;
        let bots = bots.min(n);
        let influencers = influencers.min(n - bots);
        (n - bots - influencers, bots, influencers)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_config(self)
    }
}

/// One violated configuration constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Returns every violated constraint; an empty list means the config is usable.
pub fn validate_config(c: &SimulationConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut fail = |field: &str, message: String| {
        out.push(Violation {
            field: field.to_string(),
            message,
        })
    };

    let counts: [(&str, u64); 9] = [
        ("timesteps", c.timesteps as u64),
        ("n_users", c.n_users as u64),
        ("initial_news", c.initial_news as u64),
        ("recs_per_step", c.recs_per_step as u64),
        ("topic_dim", c.topic_dim as u64),
        ("feed_cap", c.feed_cap as u64),
        ("steps_per_day", c.steps_per_day as u64),
        ("knn_neighbors", c.knn_neighbors as u64),
        ("popularity_window", c.popularity_window as u64),
    ];
    for (field, v) in counts {
        if v == 0 {
            fail(field, "must be positive".into());
        }
    }
    if c.n_users == 1 {
        fail("n_users", "the follow graph needs at least 2 agents".into());
    }
    if c.timesteps > MAX_TIMESTEPS {
        fail("timesteps", format!("must be at most {MAX_TIMESTEPS}"));
    }
    if !(c.avg_followers.is_finite() && c.avg_followers > 0.0) {
        fail("avg_followers", format!("must be positive, got {}", c.avg_followers));
    }

    for (field, v) in [
        ("misinfo_pct", c.misinfo_pct),
        ("bot_pct", c.bot_pct),
        ("influencer_pct", c.influencer_pct),
    ] {
        if !(0.0..=1.0).contains(&v) {
            fail(field, format!("must be in [0, 1], got {v}"));
        }
    }
    if c.bot_pct + c.influencer_pct >= 1.0 {
        fail(
            "bot_pct+influencer_pct",
            format!(
                "must sum to less than 1, got {}",
                c.bot_pct + c.influencer_pct
            ),
        );
    }

    for (field, v) in [
        ("engagement_decay", c.engagement_decay),
        ("engagement_bump", c.engagement_bump),
        ("authored_topic_noise", c.authored_topic_noise),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            fail(field, format!("must be a non-negative number, got {v}"));
        }
    }

    for kind in AgentKind::ALL {
        let p = c.kind_params(kind);
        let prefix = kind.name();
        for (name, (lo, hi)) in [("activity", p.activity), ("naivety", p.naivety)] {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                fail(
                    &format!("{prefix}.{name}"),
                    format!("range must satisfy 0 <= lo <= hi <= 1, got ({lo}, {hi})"),
                );
            }
        }
        for (name, v) in [
            ("post_prob", p.post_prob),
            ("post_misinfo_prob", p.post_misinfo_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                fail(&format!("{prefix}.{name}"), format!("must be in [0, 1], got {v}"));
            }
        }
        for (name, v) in [
            ("fake_share_factor", p.fake_share_factor),
            ("follow_boost", p.follow_boost),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                fail(
                    &format!("{prefix}.{name}"),
                    format!("must be a non-negative number, got {v}"),
                );
            }
        }
        if p.follow_boost.is_finite() && p.follow_boost == 0.0 {
            fail(&format!("{prefix}.follow_boost"), "must be positive".into());
        }
    }
    out
}
