//! Top-N recommendation strategies behind one interface.
//!
//! Every strategy excludes items the agent has engaged with or authored,
//! emits distinct ids, and breaks score ties by lower content id.

mod content_based;
mod item_knn;
pub mod matrix;
mod popularity;
mod random;
mod user_knn;

use std::cmp::Ordering;

pub use content_based::{recommend_content_based, ContentBased};
pub use item_knn::{recommend_item_knn, ItemKnn, ItemSimilarityIndex};
pub use matrix::{InteractionLog, InteractionMatrix};
pub use popularity::{popularity_scores, recommend_popular, Popularity};
pub use random::{recommend_random, RandomRecommender};
pub use user_knn::{recommend_user_knn, user_knn_scores, UserKnn};

use crate::content::ContentCatalog;
use crate::domain::{AgentId, AgentProfile, Algorithm, ContentId, RandomSource, SimulationConfig, Step};

/// Frozen view of the world used to compute one step's recommendations.
#[derive(Clone, Copy)]
pub struct RecContext<'a> {
    pub step: Step,
    pub agents: &'a [AgentProfile],
    pub catalog: &'a ContentCatalog,
    pub matrix: &'a InteractionMatrix,
    pub knn_neighbors: usize,
    pub popularity_window: u32,
}

impl<'a> RecContext<'a> {
    pub fn new(
        step: Step,
        agents: &'a [AgentProfile],
        catalog: &'a ContentCatalog,
        matrix: &'a InteractionMatrix,
        config: &SimulationConfig,
    ) -> Self {
        RecContext {
            step,
            agents,
            catalog,
            matrix,
            knn_neighbors: config.knn_neighbors,
            popularity_window: config.popularity_window,
        }
    }

    /// Not yet engaged and not authored by `agent`.
    pub fn is_eligible(&self, agent: AgentId, item: ContentId) -> bool {
        !self.matrix.contains(agent, item) && self.catalog.item(item).author != Some(agent)
    }
}

pub trait Recommender: Send + Sync {
    fn algorithm(&self) -> Algorithm;

    /// Whether agents below the cold-start threshold should get random lists instead.
    fn needs_history(&self) -> bool {
        false
    }

    /// Refresh any per-step state from the frozen snapshot.
    fn prepare(&mut self, _ctx: &RecContext<'_>) {}

    /// Up to `n` ranked, distinct, eligible content ids.
    fn recommend(
        &self,
        ctx: &RecContext<'_>,
        agent: AgentId,
        n: usize,
        rng: &mut RandomSource,
    ) -> Vec<ContentId>;
}

pub fn build_recommender(algorithm: Algorithm) -> Box<dyn Recommender> {
    match algorithm {
        Algorithm::Random => Box::new(RandomRecommender),
        Algorithm::Popularity => Box::new(Popularity::default()),
        Algorithm::UserKnn => Box::new(UserKnn),
        Algorithm::ItemKnn => Box::new(ItemKnn::default()),
        Algorithm::ContentBased => Box::new(ContentBased::default()),
    }
}

/// Descending score, then ascending id. Scores are never NaN; `-0.0 == 0.0`.
#[inline]
pub(crate) fn rank_order(a: &(ContentId, f64), b: &(ContentId, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.cmp(&b.0))
}

/// The `n` best `(id, score)` pairs in rank order.
pub(crate) fn top_n(mut scored: Vec<(ContentId, f64)>, n: usize) -> Vec<ContentId> {
    if n == 0 {
        return Vec::new();
    }
    if scored.len() > n {
        scored.select_nth_unstable_by(n - 1, rank_order);
        scored.truncate(n);
    }
    scored.sort_unstable_by(rank_order);
    scored.into_iter().map(|(id, _)| id).collect()
}
