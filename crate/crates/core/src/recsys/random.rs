use rand::seq::index;
use rand::Rng;

use super::{RecContext, Recommender};
use crate::domain::{AgentId, Algorithm, ContentId, RandomSource};

/// `n` distinct eligible items drawn uniformly without replacement, in draw order
/// (fewer if fewer are eligible).
pub fn recommend_random(
    ctx: &RecContext<'_>,
    agent: AgentId,
    n: usize,
    rng: &mut RandomSource,
) -> Vec<ContentId> {
    let total = ctx.catalog.len() as ContentId;
    let mut picked: Vec<ContentId> = Vec::with_capacity(n);
    if total == 0 || n == 0 {
        return picked;
    }
    // Rejection sampling: each accepted draw is uniform over the eligible
    // items not yet picked. Cheap while most of the catalog is eligible.
    for _ in 0..4 * n {
        if picked.len() == n {
            return picked;
        }
        let i = rng.random_range(0..total);
        if ctx.is_eligible(agent, i) && !picked.contains(&i) {
            picked.push(i);
        }
    }
    let rest: Vec<ContentId> = (0..total)
        .filter(|&i| ctx.is_eligible(agent, i) && !picked.contains(&i))
        .collect();
    let amount = (n - picked.len()).min(rest.len());
    picked.extend(index::sample(rng, rest.len(), amount).into_iter().map(|k| rest[k]));
    picked
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RandomRecommender;

impl Recommender for RandomRecommender {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Random
    }

    fn recommend(
        &self,
        ctx: &RecContext<'_>,
        agent: AgentId,
        n: usize,
        rng: &mut RandomSource,
    ) -> Vec<ContentId> {
        recommend_random(ctx, agent, n, rng)
    }
}
