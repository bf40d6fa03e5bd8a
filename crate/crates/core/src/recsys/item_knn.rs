use super::{top_n, InteractionMatrix, RecContext, Recommender};
use crate::content::ContentCatalog;
use crate::domain::{AgentId, Algorithm, ContentId, RandomSource};

/// Truncated item-item cosine model over binary interaction columns.
///
/// For every item `c` only its `k` most similar items (ties by lower id) are
/// kept. The model is stored inverted: `reverse[j]` lists every `(c, sim)`
/// with `j` among `c`'s top-k neighbours.
#[derive(Debug, Clone, Default)]
pub struct ItemSimilarityIndex {
    reverse: Vec<Vec<(ContentId, f64)>>,
}

impl ItemSimilarityIndex {
    pub fn build(matrix: &InteractionMatrix, k: usize) -> Self {
        let bound = matrix.item_bound();
        let mut reverse: Vec<Vec<(ContentId, f64)>> = vec![Vec::new(); bound];
        let mut counts = vec![0u32; bound];
        let mut touched: Vec<ContentId> = Vec::new();
        let mut sims: Vec<(ContentId, f64)> = Vec::new();

        for c in 0..bound as ContentId {
            let col = matrix.col(c);
            if col.is_empty() || k == 0 {
                continue;
            }
            for &v in col {
                for &j in matrix.row(v) {
                    if j != c {
                        if counts[j as usize] == 0 {
                            touched.push(j);
                        }
                        counts[j as usize] += 1;
                    }
                }
            }
            let nc = col.len();
            sims.clear();
            sims.extend(touched.drain(..).map(|j| {
                let nj = matrix.col(j).len();
                let sim = counts[j as usize] as f64 / ((nc * nj) as f64).sqrt();
                counts[j as usize] = 0;
                (j, sim)
            }));
            if sims.len() > k {
                sims.select_nth_unstable_by(k - 1, |a, b| {
                    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
                });
                sims.truncate(k);
            }
            for &(j, sim) in &sims {
                reverse[j as usize].push((c, sim));
            }
        }
        ItemSimilarityIndex { reverse }
    }

    /// Candidates that keep `j` among their top-k neighbours.
    pub fn neighbours_of(&self, j: ContentId) -> &[(ContentId, f64)] {
        self.reverse.get(j as usize).map_or(&[], Vec::as_slice)
    }
}

impl ItemSimilarityIndex {
    /// Item-based scores for `agent`, ascending id: a candidate scores the
    /// summed similarity (in ascending item id) to the agent's engaged items
    /// that are within the candidate's top-k. Only positive scores are
    /// returned, and already engaged items are left in.
    pub fn scores(&self, agent: AgentId, matrix: &InteractionMatrix) -> Vec<(ContentId, f64)> {
        let mut score = vec![0.0f64; self.reverse.len()];
        let mut touched = Vec::new();
        for &j in matrix.row(agent) {
            for &(c, sim) in self.neighbours_of(j) {
                if score[c as usize] == 0.0 {
                    touched.push(c);
                }
                score[c as usize] += sim;
            }
        }
        touched.sort_unstable();
        touched
            .into_iter()
            .map(|c| (c, score[c as usize]))
            .filter(|&(_, s)| s > 0.0)
            .collect()
    }
}

/// Item-based collaborative filtering: the top `n` eligible items by
/// [`ItemSimilarityIndex::scores`]. Zero-score items are never emitted.
pub fn recommend_item_knn(
    agent: AgentId,
    index: &ItemSimilarityIndex,
    matrix: &InteractionMatrix,
    catalog: &ContentCatalog,
    n: usize,
) -> Vec<ContentId> {
    let scored = index
        .scores(agent, matrix)
        .into_iter()
        .filter(|&(c, _)| !matrix.contains(agent, c) && catalog.item(c).author != Some(agent))
        .collect();
    top_n(scored, n)
}

/// Rebuilds the similarity index once per step from the frozen matrix.
#[derive(Debug, Clone, Default)]
pub struct ItemKnn {
    index: ItemSimilarityIndex,
    built_at_nnz: Option<usize>,
}

impl Recommender for ItemKnn {
    fn algorithm(&self) -> Algorithm {
        Algorithm::ItemKnn
    }

    fn needs_history(&self) -> bool {
        true
    }

    fn prepare(&mut self, ctx: &RecContext<'_>) {
        // The matrix is append-only, so an unchanged entry count means an unchanged matrix.
        if self.built_at_nnz != Some(ctx.matrix.nnz()) {
            self.index = ItemSimilarityIndex::build(ctx.matrix, ctx.knn_neighbors);
            self.built_at_nnz = Some(ctx.matrix.nnz());
        }
    }

    fn recommend(
        &self,
        ctx: &RecContext<'_>,
        agent: AgentId,
        n: usize,
        _rng: &mut RandomSource,
    ) -> Vec<ContentId> {
        recommend_item_knn(agent, &self.index, ctx.matrix, ctx.catalog, n)
    }
}
