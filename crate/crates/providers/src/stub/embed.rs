use std::collections::BTreeMap;

use async_trait::async_trait;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::seed_of;
use crate::{normalize, Embedder, ProviderError, ProviderResult};

pub const HASH_EMBEDDING_DIM: usize = 32;

/// Bag-of-words hash projection: every lower-cased alphanumeric token maps
/// to a seeded pseudo-random vector, a text is the normalized sum of its
/// tokens. Texts sharing words land close together.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    pub seed: u64,
    pub dim: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self { seed: 0, dim: HASH_EMBEDDING_DIM }
    }
}

impl HashEmbedder {
    pub fn new(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn token_vector(&self, token: &str) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_of(&[&self.seed.to_le_bytes(), token.as_bytes()]));
        (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    pub fn embed_one(&self, text: &str) -> Vec<f64> {
        let lower = text.to_lowercase();
        let mut tokens: Vec<&str> = lower
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            tokens.push(lower.as_str());
        }
        let mut sum = vec![0.0; self.dim];
        for t in tokens {
            for (s, v) in sum.iter_mut().zip(self.token_vector(t)) {
                *s += v;
            }
        }
        // A zero sum needs tokens that cancel exactly; fall back to the
        // whole-text vector.
        normalize(sum).unwrap_or_else(|| {
            normalize(self.token_vector(&lower)).expect("random vector is non-zero")
        })
    }
}

#[async_trait]
impl Embedder for HashEmbedder {
    async fn embed(&self, texts: &[String]) -> ProviderResult<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(ProviderError::InvalidInput("nothing to embed".into()));
        }
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }

    fn id(&self) -> String {
        format!("stub-hash-embedder-d{}-s{}", self.dim, self.seed)
    }
}

/// Fixed text-to-vector table, for tests that need exact geometry. Vectors
/// are normalized on insert; unknown texts are an error.
#[derive(Debug, Clone, Default)]
pub struct TableEmbedder {
    table: BTreeMap<String, Vec<f64>>,
}

impl TableEmbedder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, text: impl Into<String>, vector: Vec<f64>) -> Self {
        self.insert(text, vector);
        self
    }

    pub fn insert(&mut self, text: impl Into<String>, vector: Vec<f64>) {
        let v = normalize(vector).expect("table vectors must be non-zero");
        self.table.insert(text.into(), v);
    }
}

#[async_trait]
impl Embedder for TableEmbedder {
    async fn embed(&self, texts: &[String]) -> ProviderResult<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(ProviderError::InvalidInput("nothing to embed".into()));
        }
        texts
            .iter()
            .map(|t| {
                self.table
                    .get(t)
                    .cloned()
                    .ok_or_else(|| ProviderError::InvalidInput(format!("no vector for {t:?}")))
            })
            .collect()
    }

    fn id(&self) -> String {
        format!("table-embedder-{}", self.table.len())
    }
}
