use std::collections::BTreeMap;

use recomb_core::KeywordSet;
use serde::{Deserialize, Serialize};

use crate::metrics::{DiversityScore, PrecisionRecall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalKind {
    Keywords,
    Recommend,
    Diversity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub kind: EvalKind,
    /// Provider id per slot.
    pub providers: BTreeMap<String, String>,
    pub seed: u64,
    pub match_threshold: f64,
    pub n_sets: usize,
    pub sample_sizes: (usize, usize),
    pub manifest_sha256: String,
    pub images: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageOutcome {
    pub image: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<KeywordSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_matter: Option<PrecisionRecall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_pose: Option<PrecisionRecall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theme_mood_similarity: Option<f64>,
    #[serde(default)]
    pub degraded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordsReport {
    /// Counts pooled over every scored image.
    pub subject_matter: PrecisionRecall,
    pub action_pose: PrecisionRecall,
    /// Mean over images where both sides have theme & mood keywords.
    pub theme_mood_similarity: Option<f64>,
    pub theme_mood_images: usize,
    pub images: Vec<ImageOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandingSet {
    pub image: String,
    pub originals: Vec<String>,
    pub recommended: Vec<String>,
    pub irrelevant: Vec<String>,
    pub synonyms: Vec<String>,
    pub sim_irrelevant: f64,
    pub sim_recommended: f64,
    pub sim_synonym: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandingReport {
    pub sim_irrelevant: Option<f64>,
    pub sim_recommended: Option<f64>,
    pub sim_synonym: Option<f64>,
    pub sets: Vec<BandingSet>,
    pub skipped: Vec<String>,
    /// Set when a provider failure stopped the run early.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySet {
    pub image: String,
    pub keywords: KeywordSet,
    pub generated: Vec<String>,
    pub paraphrases: Vec<String>,
    pub random_descriptions: Option<Vec<String>>,
    pub random: Option<DiversityScore>,
    pub generated_score: DiversityScore,
    pub paraphrase_score: DiversityScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub random: Option<DiversityScore>,
    pub generated: Option<DiversityScore>,
    pub paraphrase: Option<DiversityScore>,
    pub sets: Vec<DiversitySet>,
    pub skipped: Vec<String>,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metadata: RunMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords: Option<KeywordsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub banding: Option<BandingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diversity: Option<DiversityReport>,
}

fn check_pr(what: &str, pr: &PrecisionRecall, issues: &mut Vec<String>) {
    for (name, v) in [("precision", pr.precision), ("recall", pr.recall)] {
        if !(0.0..=1.0).contains(&v) {
            issues.push(format!("{what} {name} {v} outside [0, 1]"));
        }
    }
}

fn check_sim(what: &str, v: Option<f64>, issues: &mut Vec<String>) {
    if let Some(v) = v {
        if !(-1.0..=1.0).contains(&v) {
            issues.push(format!("{what} similarity {v} outside [-1, 1]"));
        }
    }
}

fn check_div(what: &str, d: Option<&DiversityScore>, issues: &mut Vec<String>) {
    if let Some(d) = d {
        check_sim(what, Some(d.similarity), issues);
        if !d.is_consistent() {
            issues.push(format!("{what}: diversity {} is not 1 - {}", d.diversity, d.similarity));
        }
    }
}

impl EvalReport {
    /// Pretty JSON with a trailing newline. Field order is fixed, so equal
    /// reports give equal bytes.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports serialize");
        out.push(b'\n');
        out
    }

    /// Range and identity checks over every number in the report.
    pub fn check(&self) -> Result<(), Vec<String>> {
        let mut issues = Vec::new();
        if let Some(k) = &self.keywords {
            check_pr("subject matter", &k.subject_matter, &mut issues);
            check_pr("action & pose", &k.action_pose, &mut issues);
            check_sim("theme & mood", k.theme_mood_similarity, &mut issues);
            for img in &k.images {
                for pr in [&img.subject_matter, &img.action_pose].into_iter().flatten() {
                    check_pr(&img.image, pr, &mut issues);
                }
                check_sim(&img.image, img.theme_mood_similarity, &mut issues);
            }
        }
        if let Some(b) = &self.banding {
            check_sim("irrelevant", b.sim_irrelevant, &mut issues);
            check_sim("recommended", b.sim_recommended, &mut issues);
            check_sim("synonym", b.sim_synonym, &mut issues);
            for s in &b.sets {
                for v in [s.sim_irrelevant, s.sim_recommended, s.sim_synonym] {
                    check_sim(&s.image, Some(v), &mut issues);
                }
            }
        }
        if let Some(d) = &self.diversity {
            check_div("random", d.random.as_ref(), &mut issues);
            check_div("generated", d.generated.as_ref(), &mut issues);
            check_div("paraphrase", d.paraphrase.as_ref(), &mut issues);
            for s in &d.sets {
                check_div(&s.image, s.random.as_ref(), &mut issues);
                check_div(&s.image, Some(&s.generated_score), &mut issues);
                check_div(&s.image, Some(&s.paraphrase_score), &mut issues);
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }
}
