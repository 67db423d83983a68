use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recomb_core::{KeywordCategory, KeywordSet, MemoryBlobs};
use recomb_pipeline::{Orchestrator, PipelineError};
use recomb_providers::{Embedder, ProviderBundle};

use crate::error::EvalResult;
use crate::manifest::Manifest;
use crate::metrics::{self, match_pr, mean_embedding_similarity, DiversityScore, PrecisionRecall};
use crate::report::{
    BandingReport, BandingSet, DiversityReport, DiversitySet, EvalKind, EvalReport, ImageOutcome,
    KeywordsReport, RunMetadata,
};
use crate::sample::{self, KeywordSample, DEFAULT_N_SETS, DEFAULT_SAMPLE_SIZES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    pub seed: u64,
    pub match_threshold: f64,
    pub n_sets: usize,
    pub sample_sizes: (usize, usize),
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            seed: 0,
            match_threshold: metrics::DEFAULT_MATCH_THRESHOLD,
            n_sets: DEFAULT_N_SETS,
            sample_sizes: DEFAULT_SAMPLE_SIZES,
        }
    }
}

/// Scores one image's predicted keywords against its ground truth.
pub async fn score_image(
    embedder: &dyn Embedder,
    name: &str,
    truth: &KeywordSet,
    predicted: KeywordSet,
    threshold: f64,
) -> EvalResult<ImageOutcome> {
    let sm = KeywordCategory::SubjectMatter;
    let ap = KeywordCategory::ActionPose;
    let tm = KeywordCategory::ThemeMood;
    let subject_matter = match_pr(embedder, predicted.get(sm), truth.get(sm), threshold).await?;
    let action_pose = match_pr(embedder, predicted.get(ap), truth.get(ap), threshold).await?;
    let theme_mood_similarity = if predicted.get(tm).is_empty() || truth.get(tm).is_empty() {
        None
    } else {
        Some(mean_embedding_similarity(embedder, predicted.get(tm), truth.get(tm)).await?)
    };
    Ok(ImageOutcome {
        image: name.to_string(),
        predicted: Some(predicted),
        subject_matter: Some(subject_matter),
        action_pose: Some(action_pose),
        theme_mood_similarity,
        degraded: false,
        error: None,
    })
}

/// Pools per-image outcomes. Failed images are listed but not scored.
pub fn summarize_keywords(images: Vec<ImageOutcome>) -> KeywordsReport {
    let subject_matter = PrecisionRecall::pooled(images.iter().filter_map(|i| i.subject_matter.as_ref()));
    let action_pose = PrecisionRecall::pooled(images.iter().filter_map(|i| i.action_pose.as_ref()));
    let tm: Vec<f64> = images.iter().filter_map(|i| i.theme_mood_similarity).collect();
    KeywordsReport {
        subject_matter,
        action_pose,
        theme_mood_similarity: metrics::mean(&tm),
        theme_mood_images: tm.len(),
        images,
    }
}

/// Similarity of each control group to the original keywords:
/// `(irrelevant, recommended, synonym)`.
pub async fn band_set(
    embedder: &dyn Embedder,
    originals: &[String],
    recommended: &[String],
    irrelevant: &[String],
    synonyms: &[String],
) -> EvalResult<(f64, f64, f64)> {
    Ok((
        mean_embedding_similarity(embedder, originals, irrelevant).await?,
        mean_embedding_similarity(embedder, originals, recommended).await?,
        mean_embedding_similarity(embedder, originals, synonyms).await?,
    ))
}

/// Runs the evaluations against a provider bundle.
pub struct Evaluator {
    orchestrator: Orchestrator,
    params: EvalParams,
}

enum SetError {
    Skip(String),
    Abort(String),
}

fn classify(what: &str, e: PipelineError) -> SetError {
    match e {
        PipelineError::Provider { .. } => SetError::Abort(format!("{what}: {e}")),
        other => SetError::Skip(format!("{what}: {other}")),
    }
}

impl Evaluator {
    pub fn new(providers: ProviderBundle, params: EvalParams) -> Self {
        let orchestrator = Orchestrator::new(providers, Arc::new(MemoryBlobs::new())).with_seed(params.seed);
        Self { orchestrator, params }
    }

    pub fn params(&self) -> &EvalParams {
        &self.params
    }

    fn embedder(&self) -> &dyn Embedder {
        self.orchestrator.providers().embedder.as_ref()
    }

    fn metadata(&self, kind: EvalKind, manifest: &Manifest) -> RunMetadata {
        RunMetadata {
            kind,
            providers: self
                .orchestrator
                .providers()
                .ids()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            seed: self.params.seed,
            match_threshold: self.params.match_threshold,
            n_sets: self.params.n_sets,
            sample_sizes: self.params.sample_sizes,
            manifest_sha256: manifest.sha256.clone(),
            images: manifest.len(),
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.params.seed)
    }

    /// Extracts keywords from every image and scores them. Images that
    /// cannot be read or extracted are reported with their error.
    pub async fn keywords(&self, manifest: &Manifest) -> EvalResult<EvalReport> {
        let mut outcomes = Vec::with_capacity(manifest.len());
        for (i, img) in manifest.images.iter().enumerate() {
            let failed = |error: String| ImageOutcome {
                image: img.name.clone(),
                predicted: None,
                subject_matter: None,
                action_pose: None,
                theme_mood_similarity: None,
                degraded: false,
                error: Some(error),
            };
            let bytes = match std::fs::read(&img.path) {
                Ok(b) => b,
                Err(e) => {
                    outcomes.push(failed(format!("{}: {e}", img.path.display())));
                    continue;
                }
            };
            match self.orchestrator.extract_keywords(&bytes, &format!("img-{i}")).await {
                Ok(ex) => {
                    let mut outcome =
                        score_image(self.embedder(), &img.name, &img.truth, ex.keywords, self.params.match_threshold)
                            .await?;
                    outcome.degraded = ex.degraded;
                    outcomes.push(outcome);
                }
                Err(e) => {
                    tracing::warn!(image = %img.name, error = %e, "extraction failed");
                    outcomes.push(failed(e.to_string()));
                }
            }
        }
        Ok(EvalReport {
            metadata: self.metadata(EvalKind::Keywords, manifest),
            keywords: Some(summarize_keywords(outcomes)),
            banding: None,
            diversity: None,
        })
    }

    async fn band_one(
        &self,
        manifest: &Manifest,
        sample: &KeywordSample,
        rng: &mut ChaCha8Rng,
    ) -> Result<BandingSet, SetError> {
        let originals = sample.texts();
        let irrelevant = sample::irrelevant_keywords(manifest, sample, originals.len(), rng);
        if irrelevant.is_empty() {
            return Err(SetError::Skip("no keywords left for the irrelevant group".into()));
        }
        let recommended = self
            .orchestrator
            .recommend(&sample.keywords)
            .await
            .map_err(|e| classify("recommend", e))?
            .keywords
            .texts();
        if recommended.is_empty() {
            return Err(SetError::Skip("empty recommendation".into()));
        }
        let synonyms = self.orchestrator.paraphrase(&originals).await.map_err(|e| classify("paraphrase", e))?;
        let (sim_irrelevant, sim_recommended, sim_synonym) =
            band_set(self.embedder(), &originals, &recommended, &irrelevant, &synonyms)
                .await
                .map_err(|e| SetError::Abort(format!("embed: {e}")))?;
        Ok(BandingSet {
            image: manifest.images[sample.image].name.clone(),
            originals,
            recommended,
            irrelevant,
            synonyms,
            sim_irrelevant,
            sim_recommended,
            sim_synonym,
        })
    }

    /// Compares recommendations with an irrelevant and a synonym group,
    /// each by mean-embedding similarity to the sampled keywords.
    pub async fn recommend(&self, manifest: &Manifest) -> EvalResult<EvalReport> {
        let mut rng = self.rng();
        let samples = sample::sample_sets(manifest, self.params.n_sets, self.params.sample_sizes, &mut rng)?;
        let mut sets = Vec::new();
        let mut skipped = Vec::new();
        let mut aborted = None;
        for s in &samples {
            let name = &manifest.images[s.image].name;
            match self.band_one(manifest, s, &mut rng).await {
                Ok(set) => sets.push(set),
                Err(SetError::Skip(why)) => skipped.push(format!("{name}: {why}")),
                Err(SetError::Abort(why)) => {
                    aborted = Some(format!("{name}: {why}"));
                    break;
                }
            }
        }
        let avg = |f: fn(&BandingSet) -> f64| metrics::mean(&sets.iter().map(f).collect::<Vec<_>>());
        let banding = BandingReport {
            sim_irrelevant: avg(|s| s.sim_irrelevant),
            sim_recommended: avg(|s| s.sim_recommended),
            sim_synonym: avg(|s| s.sim_synonym),
            sets,
            skipped,
            aborted,
        };
        Ok(EvalReport {
            metadata: self.metadata(EvalKind::Recommend, manifest),
            keywords: None,
            banding: Some(banding),
            diversity: None,
        })
    }

    async fn diversify_one(
        &self,
        manifest: &Manifest,
        sample: &KeywordSample,
        rng: &mut ChaCha8Rng,
    ) -> Result<DiversitySet, SetError> {
        let random_descriptions = sample::random_descriptions(manifest, sample.image, rng);
        let drafts = self
            .orchestrator
            .draft_texts(&sample.keywords)
            .await
            .map_err(|e| classify("recombine", e))?;
        if drafts.drafts.len() < 3 {
            return Err(SetError::Skip(format!("{} drafts instead of 3", drafts.drafts.len())));
        }
        let generated: Vec<String> = drafts.drafts.iter().take(3).map(|d| d.caption.clone()).collect();
        let first = generated[0].clone();
        let paraphrases = self
            .orchestrator
            .paraphrase(&[first.clone(), first.clone()])
            .await
            .map_err(|e| classify("paraphrase", e))?;
        let embed_err = |e: crate::error::EvalError| SetError::Abort(format!("embed: {e}"));
        let generated_score = metrics::diversity(self.embedder(), &generated).await.map_err(embed_err)?;
        let mut para_group = vec![first];
        para_group.extend(paraphrases.iter().cloned());
        let paraphrase_score = metrics::diversity(self.embedder(), &para_group).await.map_err(embed_err)?;
        let random = match &random_descriptions {
            Some(d) => Some(metrics::diversity(self.embedder(), d).await.map_err(embed_err)?),
            None => None,
        };
        Ok(DiversitySet {
            image: manifest.images[sample.image].name.clone(),
            keywords: sample.keywords.clone(),
            generated,
            paraphrases,
            random_descriptions,
            random,
            generated_score,
            paraphrase_score,
        })
    }

    /// Diversity of three generated descriptions per keyword set, against
    /// three random dataset descriptions and a description with two of its
    /// paraphrases.
    pub async fn diversity(&self, manifest: &Manifest) -> EvalResult<EvalReport> {
        let mut rng = self.rng();
        let samples = sample::sample_sets(manifest, self.params.n_sets, self.params.sample_sizes, &mut rng)?;
        let mut sets = Vec::new();
        let mut skipped = Vec::new();
        let mut aborted = None;
        for s in &samples {
            let name = &manifest.images[s.image].name;
            match self.diversify_one(manifest, s, &mut rng).await {
                Ok(set) => sets.push(set),
                Err(SetError::Skip(why)) => skipped.push(format!("{name}: {why}")),
                Err(SetError::Abort(why)) => {
                    aborted = Some(format!("{name}: {why}"));
                    break;
                }
            }
        }
        let diversity = DiversityReport {
            random: DiversityScore::mean(sets.iter().filter_map(|s| s.random.as_ref())),
            generated: DiversityScore::mean(sets.iter().map(|s| &s.generated_score)),
            paraphrase: DiversityScore::mean(sets.iter().map(|s| &s.paraphrase_score)),
            sets,
            skipped,
            aborted,
        };
        Ok(EvalReport {
            metadata: self.metadata(EvalKind::Diversity, manifest),
            keywords: None,
            banding: None,
            diversity: Some(diversity),
        })
    }
}
