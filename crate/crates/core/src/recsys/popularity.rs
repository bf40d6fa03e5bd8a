use super::{rank_order, RecContext, Recommender};
use crate::domain::{AgentId, Algorithm, ContentId, RandomSource};

/// Popularity score of every item: current engagement plus the number of
/// engage events in `[step - W, step]`.
pub fn popularity_scores(ctx: &RecContext<'_>) -> Vec<(ContentId, f64)> {
    let from = ctx.step.saturating_sub(ctx.popularity_window);
    ctx.catalog
        .items()
        .iter()
        .filter(|item| item.creation_step <= ctx.step)
        .map(|item| {
            let engagement = ctx
                .catalog
                .engagement(item.id, ctx.step)
                .expect("item created at or before step");
            let recent = ctx.catalog.engage_count(item.id, from, ctx.step);
            (item.id, engagement + recent as f64)
        })
        .collect()
}

fn ranked(ctx: &RecContext<'_>) -> Vec<ContentId> {
    let mut scored = popularity_scores(ctx);
    scored.sort_unstable_by(rank_order);
    scored.into_iter().map(|(id, _)| id).collect()
}

fn take_eligible(ranking: &[ContentId], ctx: &RecContext<'_>, agent: AgentId, n: usize) -> Vec<ContentId> {
    ranking
        .iter()
        .copied()
        .filter(|&i| ctx.is_eligible(agent, i))
        .take(n)
        .collect()
}

/// Top `n` eligible items by popularity score.
pub fn recommend_popular(ctx: &RecContext<'_>, agent: AgentId, n: usize) -> Vec<ContentId> {
    take_eligible(&ranked(ctx), ctx, agent, n)
}

/// Ranks the catalog once per step and serves every agent from that ranking.
#[derive(Debug, Clone, Default)]
pub struct Popularity {
    ranking: Vec<ContentId>,
}

impl Recommender for Popularity {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Popularity
    }

    fn prepare(&mut self, ctx: &RecContext<'_>) {
        self.ranking = ranked(ctx);
    }

    fn recommend(
        &self,
        ctx: &RecContext<'_>,
        agent: AgentId,
        n: usize,
        _rng: &mut RandomSource,
    ) -> Vec<ContentId> {
        take_eligible(&self.ranking, ctx, agent, n)
    }
}
