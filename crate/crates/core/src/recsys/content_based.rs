use super::{rank_order, top_n, RecContext, Recommender};
use crate::domain::{AgentId, Algorithm, ContentId, RandomSource};
use crate::netgen::unit_dot;

/// Top `n` eligible items by cosine between topic and the agent's preference.
pub fn recommend_content_based(ctx: &RecContext<'_>, agent: AgentId, n: usize) -> Vec<ContentId> {
    let pref = &ctx.agents[agent as usize].preference;
    let scored = ctx
        .catalog
        .items()
        .iter()
        .filter(|item| ctx.is_eligible(agent, item.id))
        .map(|item| (item.id, unit_dot(pref, &item.topic)))
        .collect();
    top_n(scored, n)
}

/// Keeps one full ranking per agent. Preferences and topics never change,
/// so each step only inserts the items created since the last call.
#[derive(Debug, Clone, Default)]
pub struct ContentBased {
    rankings: Vec<Vec<(ContentId, f64)>>,
    indexed: usize,
}

impl Recommender for ContentBased {
    fn algorithm(&self) -> Algorithm {
        Algorithm::ContentBased
    }

    fn prepare(&mut self, ctx: &RecContext<'_>) {
        if self.rankings.len() != ctx.agents.len() {
            self.rankings = vec![Vec::new(); ctx.agents.len()];
            self.indexed = 0;
        }
        let new_items = &ctx.catalog.items()[self.indexed..];
        if new_items.is_empty() {
            return;
        }
        for (agent, ranking) in ctx.agents.iter().zip(&mut self.rankings) {
            for item in new_items {
                let entry = (item.id, unit_dot(&agent.preference, &item.topic));
                let at = ranking.partition_point(|e| rank_order(e, &entry).is_lt());
                ranking.insert(at, entry);
            }
        }
        self.indexed = ctx.catalog.len();
    }

    fn recommend(
        &self,
        ctx: &RecContext<'_>,
        agent: AgentId,
        n: usize,
        _rng: &mut RandomSource,
    ) -> Vec<ContentId> {
        match self.rankings.get(agent as usize) {
            Some(ranking) if self.indexed == ctx.catalog.len() => ranking
                .iter()
                .map(|&(id, _)| id)
                .filter(|&id| ctx.is_eligible(agent, id))
                .take(n)
                .collect(),
            _ => recommend_content_based(ctx, agent, n),
        }
    }
}
