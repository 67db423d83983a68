//! Seeded sampling of keyword sets and control groups from a manifest.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use recomb_core::model::fold_text;
use recomb_core::{KeywordCategory, KeywordSet};
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, EvalResult};
use crate::manifest::Manifest;

/// Smallest and largest number of keywords drawn per set.
pub const DEFAULT_SAMPLE_SIZES: (usize, usize) = (3, 10);
pub const DEFAULT_N_SETS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSample {
    /// Index into the manifest.
    pub image: usize,
    pub keywords: KeywordSet,
}

impl KeywordSample {
    pub fn texts(&self) -> Vec<String> {
        self.keywords.texts()
    }
}

/// Picks `items` of `0..len` at random, keeping them in ascending order.
fn pick_sorted<R: Rng>(rng: &mut R, len: usize, amount: usize) -> Vec<usize> {
    let mut idx = index::sample(rng, len, amount.min(len)).into_vec();
    idx.sort_unstable();
    idx
}

/// One keyword set per image for `n_sets` distinct images. Each set holds
/// a uniformly drawn number of keywords within `sizes`, capped at what
/// the image has, kept in manifest order.
pub fn sample_sets<R: Rng>(
    manifest: &Manifest,
    n_sets: usize,
    sizes: (usize, usize),
    rng: &mut R,
) -> EvalResult<Vec<KeywordSample>> {
    if sizes.0 == 0 || sizes.0 > sizes.1 {
        return Err(EvalError::InvalidArgument(format!("bad sample size range {sizes:?}")));
    }
    if n_sets == 0 || manifest.len() < n_sets {
        return Err(EvalError::InvalidArgument(format!(
            "{n_sets} sets need at least as many images; the manifest has {}",
            manifest.len()
        )));
    }
    let mut order: Vec<usize> = (0..manifest.len()).collect();
    order.shuffle(rng);
    order.truncate(n_sets);
    let mut out = Vec::with_capacity(n_sets);
    for image in order {
        let pool: Vec<(KeywordCategory, &str)> = manifest.images[image].truth.iter().collect();
        let size = rng.random_range(sizes.0..=sizes.1);
        let mut keywords = KeywordSet::new();
        for i in pick_sorted(rng, pool.len(), size) {
            keywords.insert(pool[i].0, pool[i].1);
        }
        out.push(KeywordSample { image, keywords });
    }
    Ok(out)
}

/// Up to `count` keywords from images other than `sample.image`, none of
/// which equals a keyword of the sample.
pub fn irrelevant_keywords<R: Rng>(
    manifest: &Manifest,
    sample: &KeywordSample,
    count: usize,
    rng: &mut R,
) -> Vec<String> {
    let mut seen: Vec<String> = sample.texts().iter().map(|t| fold_text(t)).collect();
    let mut pool = Vec::new();
    for (i, img) in manifest.images.iter().enumerate() {
        if i == sample.image {
            continue;
        }
        for (_, text) in img.truth.iter() {
            let key = fold_text(text);
            if !seen.contains(&key) {
                seen.push(key);
                pool.push(text.to_string());
            }
        }
    }
    pick_sorted(rng, pool.len(), count).into_iter().map(|i| pool[i].clone()).collect()
}

/// Three descriptions from other images, or `None` when the manifest has
/// fewer than three to offer.
pub fn random_descriptions<R: Rng>(manifest: &Manifest, exclude: usize, rng: &mut R) -> Option<Vec<String>> {
    let pool: Vec<&String> = manifest
        .images
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != exclude)
        .filter_map(|(_, img)| img.description.as_ref())
        .collect();
    if pool.len() < 3 {
        return None;
    }
    Some(pick_sorted(rng, pool.len(), 3).into_iter().map(|i| pool[i].clone()).collect())
}
