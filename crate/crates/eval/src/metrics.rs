//! Similarity arithmetic over embedding vectors, plus thin async wrappers
//! that fetch the vectors from an [`Embedder`].

use recomb_providers::Embedder;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, EvalResult};

/// Default cosine needed for a predicted keyword to count as matching a
/// ground-truth one.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.60;

/// Cosine similarity, clamped to [-1, 1]. A zero vector is similar to
/// nothing.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Component-wise arithmetic mean. Panics on an empty slice.
pub fn mean_vector(vs: &[Vec<f64>]) -> Vec<f64> {
    assert!(!vs.is_empty(), "mean of no vectors");
    let mut sum = vec![0.0; vs[0].len()];
    for v in vs {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
    }
    let n = vs.len() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    sum
}

/// Mean cosine over all unordered pairs. Needs at least two vectors.
pub fn mean_pairwise_similarity(vs: &[Vec<f64>]) -> Option<f64> {
    if vs.len() < 2 {
        return None;
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            sum += cosine(&vs[i], &vs[j]);
            pairs += 1;
        }
    }
    Some(sum / pairs as f64)
}

/// Greedy one-to-one matching on a `predicted × truth` similarity matrix:
/// pairs are visited from most to least similar (ties by index) and kept
/// while at or above `threshold` with both sides still free.
pub fn greedy_matches(sim: &[Vec<f64>], threshold: f64) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, row) in sim.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s >= threshold {
                pairs.push((s, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let n_truth = sim.iter().map(Vec::len).max().unwrap_or(0);
    let mut used_p = vec![false; sim.len()];
    let mut used_t = vec![false; n_truth];
    let mut out = Vec::new();
    for (_, i, j) in pairs {
        if !used_p[i] && !used_t[j] {
            used_p[i] = true;
            used_t[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Ratio with the empty-denominator convention: nothing to get wrong
/// counts as perfect.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub matched: usize,
    pub predicted: usize,
    pub truth: usize,
}

impl PrecisionRecall {
    pub fn from_counts(matched: usize, predicted: usize, truth: usize) -> Self {
        Self {
            precision: ratio(matched, predicted),
            recall: ratio(matched, truth),
            matched,
            predicted,
            truth,
        }
    }

    /// Pools the counts of several results.
    pub fn pooled<'a>(items: impl IntoIterator<Item = &'a PrecisionRecall>) -> Self {
        let (mut m, mut p, mut t) = (0, 0, 0);
        for pr in items {
            m += pr.matched;
            p += pr.predicted;
            t += pr.truth;
        }
        Self::from_counts(m, p, t)
    }
}

/// Precision and recall from embedding vectors.
pub fn match_pr_vectors(predicted: &[Vec<f64>], truth: &[Vec<f64>], threshold: f64) -> PrecisionRecall {
    let sim: Vec<Vec<f64>> = predicted
        .iter()
        .map(|p| truth.iter().map(|t| cosine(p, t)).collect())
        .collect();
    let matched = greedy_matches(&sim, threshold).len();
    PrecisionRecall::from_counts(matched, predicted.len(), truth.len())
}

fn check_threshold(threshold: f64) -> EvalResult<()> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(EvalError::InvalidArgument(format!("match threshold {threshold} is outside (0, 1]")))
    }
}

async fn embed(embedder: &dyn Embedder, texts: &[String]) -> EvalResult<Vec<Vec<f64>>> {
    let vs = embedder.embed(texts).await?;
    if vs.len() != texts.len() {
        return Err(EvalError::InvalidArgument(format!(
            "embedder returned {} vectors for {} texts",
            vs.len(),
            texts.len()
        )));
    }
    Ok(vs)
}

/// Matches predicted keywords to ground truth by embedding cosine.
pub async fn match_pr(
    embedder: &dyn Embedder,
    predicted: &[String],
    truth: &[String],
    threshold: f64,
) -> EvalResult<PrecisionRecall> {
    check_threshold(threshold)?;
    if predicted.is_empty() || truth.is_empty() {
        return Ok(PrecisionRecall::from_counts(0, predicted.len(), truth.len()));
    }
    let p = embed(embedder, predicted).await?;
    let t = embed(embedder, truth).await?;
    Ok(match_pr_vectors(&p, &t, threshold))
}

/// Cosine between the mean embeddings of two text lists.
pub async fn mean_embedding_similarity(embedder: &dyn Embedder, a: &[String], b: &[String]) -> EvalResult<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::InvalidArgument("mean embedding of an empty list".into()));
    }
    let va = embed(embedder, a).await?;
    let vb = embed(embedder, b).await?;
    Ok(cosine(&mean_vector(&va), &mean_vector(&vb)))
}

/// Similarity and diversity of a group of texts; diversity is always
/// exactly `1 - similarity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityScore {
    pub similarity: f64,
    pub diversity: f64,
}

impl DiversityScore {
    pub fn from_similarity(similarity: f64) -> Self {
        Self { similarity, diversity: 1.0 - similarity }
    }

    /// Mean similarity of several scores, with diversity recomputed.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a DiversityScore>) -> Option<Self> {
        let sims: Vec<f64> = items.into_iter().map(|d| d.similarity).collect();
        mean(&sims).map(Self::from_similarity)
    }

    pub fn is_consistent(&self) -> bool {
        self.diversity == 1.0 - self.similarity
    }
}

pub async fn diversity(embedder: &dyn Embedder, texts: &[String]) -> EvalResult<DiversityScore> {
    if texts.len() < 2 {
        return Err(EvalError::InvalidArgument("diversity needs at least two texts".into()));
    }
    let vs = embed(embedder, texts).await?;
    let sim = mean_pairwise_similarity(&vs).expect("at least two vectors");
    Ok(DiversityScore::from_similarity(sim))
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}
