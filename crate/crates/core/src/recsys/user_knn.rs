use super::{top_n, InteractionMatrix, RecContext, Recommender};
use crate::content::ContentCatalog;
use crate::domain::{AgentId, Algorithm, ContentId, RandomSource};

/// Cosine between `u`'s binary row and every other user with a nonempty row.
fn similar_users(matrix: &InteractionMatrix, u: AgentId) -> Vec<(AgentId, f64)> {
    let n = matrix.n_users();
    let mut overlap = vec![0u32; n];
    for &i in matrix.row(u) {
        for &v in matrix.col(i) {
            overlap[v as usize] += 1;
        }
    }
    let nu = matrix.engagement_count(u);
    (0..n as AgentId)
        .filter(|&v| v != u && matrix.engagement_count(v) > 0)
        .map(|v| {
            let nv = matrix.engagement_count(v);
            let sim = overlap[v as usize] as f64 / ((nu * nv) as f64).sqrt();
            (v, sim)
        })
        .collect()
}

/// User-based scores for every item some neighbour engaged, ascending id.
///
/// Neighbours are the `k` users most similar to `agent` (ties by lower id);
/// an item's score is the summed similarity, in ascending neighbour id, of
/// the neighbours who engaged it. Only positive scores are returned, and
/// items the agent already engaged are left in.
pub fn user_knn_scores(agent: AgentId, matrix: &InteractionMatrix, k: usize) -> Vec<(ContentId, f64)> {
    if matrix.engagement_count(agent) == 0 || k == 0 {
        return Vec::new();
    }
    let mut sims = similar_users(matrix, agent);
    if sims.len() > k {
        sims.select_nth_unstable_by(k - 1, |a, b| {
            b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
        });
        sims.truncate(k);
    }
    sims.sort_unstable_by_key(|&(v, _)| v);

    let mut score = vec![0.0f64; matrix.item_bound()];
    let mut touched = Vec::new();
    for &(v, sim) in &sims {
        if sim <= 0.0 {
            continue;
        }
        for &i in matrix.row(v) {
            if score[i as usize] == 0.0 {
                touched.push(i);
            }
            score[i as usize] += sim;
        }
    }
    touched.sort_unstable();
    touched.into_iter().map(|i| (i, score[i as usize])).collect()
}

/// User-based collaborative filtering over binary interaction rows: the top
/// `n` eligible items by [`user_knn_scores`]. Zero-score items are never
/// emitted, so the list may be short.
pub fn recommend_user_knn(
    agent: AgentId,
    matrix: &InteractionMatrix,
    catalog: &ContentCatalog,
    k: usize,
    n: usize,
) -> Vec<ContentId> {
    let scored = user_knn_scores(agent, matrix, k)
        .into_iter()
        .filter(|&(i, _)| !matrix.contains(agent, i) && catalog.item(i).author != Some(agent))
        .collect();
    top_n(scored, n)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UserKnn;

impl Recommender for UserKnn {
    fn algorithm(&self) -> Algorithm {
        Algorithm::UserKnn
    }

    fn needs_history(&self) -> bool {
        true
    }

    fn recommend(
        &self,
        ctx: &RecContext<'_>,
        agent: AgentId,
        n: usize,
        _rng: &mut RandomSource,
    ) -> Vec<ContentId> {
        recommend_user_knn(agent, ctx.matrix, ctx.catalog, ctx.knn_neighbors, n)
    }
}
