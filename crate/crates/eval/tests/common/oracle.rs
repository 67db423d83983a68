//! Hand-worked five-image evaluation case. Every expected number below is
//! derived by hand from the embedding table; the harness must reproduce
//! it to rounding error.

use std::path::Path;
use std::sync::Arc;

use recomb_core::prompt::{PromptKit, TemplateId, TemplateLibrary};
use recomb_core::KeywordSet;
use recomb_eval::{score_image, summarize_keywords, EvalParams, Evaluator, Manifest};
use recomb_providers::stub::{ReplayChat, TableEmbedder};
use recomb_providers::ProviderBundle;

pub const TOL: f64 = 1e-12;

fn e(i: usize, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// Six-dimensional keyword vectors. Cosines used below:
/// puppy·dog = 0.6 (3-4-5), puppy·cat = 0.8, kitten·cat = kitten·dog =
/// tree·bush = running·jumping = 1/√2, joyful·happy = 3/√10.
pub fn keyword_embedder() -> TableEmbedder {
    TableEmbedder::new()
        .with("dog", e(0, 6))
        .with("cat", e(1, 6))
        .with("puppy", vec![3.0, 4.0, 0.0, 0.0, 0.0, 0.0])
        .with("kitten", vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
        .with("tree", e(2, 6))
        .with("bush", vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        .with("running", e(3, 6))
        .with("jumping", vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0])
        .with("sitting", e(4, 6))
        .with("calm", e(5, 6))
        .with("happy", vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0])
        .with("joyful", vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0])
}

pub struct KeywordCase {
    pub truth: KeywordSet,
    pub predicted: KeywordSet,
}

fn ks(sm: &[&str], ap: &[&str], tm: &[&str]) -> KeywordSet {
    KeywordSet::from_lists(sm, ap, tm)
}

pub fn keyword_cases() -> Vec<KeywordCase> {
    vec![
        // SM: tree-tree 1, puppy-dog 0.6 -> 2 of 3 predicted, 2 of 2 truth.
        // AP: jumping-running -> 1/1. TM: identical -> 1.
        KeywordCase {
            truth: ks(&["dog", "tree"], &["running"], &["calm"]),
            predicted: ks(&["puppy", "tree", "cat"], &["jumping"], &["calm"]),
        },
        // SM: puppy-cat (0.8) beats kitten-cat -> 1 of 2, 1 of 1.
        // AP: nothing predicted -> 0 of 0, 0 of 1. TM: 3/√10.
        KeywordCase {
            truth: ks(&["cat"], &["sitting"], &["happy"]),
            predicted: ks(&["kitten", "puppy"], &[], &["joyful"]),
        },
        // SM: tree-bush -> 1/1. AP: sitting-sitting, running-jumping -> 2/2.
        // TM: mean(calm, happy) against happy is cos 22.5°.
        KeywordCase {
            truth: ks(&["bush"], &["jumping", "sitting"], &["calm", "happy"]),
            predicted: ks(&["tree"], &["running", "sitting"], &["happy"]),
        },
        // SM: dog-dog -> 1 of 1, 1 of 3. AP: 0 of 1, 0 of 0. TM: no truth.
        KeywordCase {
            truth: ks(&["dog", "cat", "tree"], &[], &[]),
            predicted: ks(&["dog"], &["sitting"], &["calm"]),
        },
        // Nothing predicted at all.
        KeywordCase {
            truth: ks(&["kitten"], &["running"], &["joyful"]),
            predicted: ks(&[], &[], &[]),
        },
    ]
}

pub struct KeywordExpectation {
    pub subject_matter: (f64, f64),
    pub action_pose: (f64, f64),
    pub theme_mood: f64,
}

pub fn keyword_expectation() -> KeywordExpectation {
    let cos_22_5 = (2.0 + 2f64.sqrt()).sqrt() / 2.0;
    KeywordExpectation {
        subject_matter: (5.0 / 7.0, 5.0 / 8.0),
        action_pose: (3.0 / 4.0, 3.0 / 5.0),
        theme_mood: (1.0 + 3.0 / 10f64.sqrt() + cos_22_5) / 3.0,
    }
}

fn close(what: &str, got: f64, want: f64) -> Result<(), String> {
    if (got - want).abs() <= TOL {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

pub async fn check_keywords() -> Result<(), String> {
    let emb = keyword_embedder();
    let mut outcomes = Vec::new();
    for (i, case) in keyword_cases().into_iter().enumerate() {
        let o = score_image(&emb, &format!("img{i}"), &case.truth, case.predicted, 0.6)
            .await
            .map_err(|e| e.to_string())?;
        outcomes.push(o);
    }
    let report = summarize_keywords(outcomes);
    let want = keyword_expectation();
    close("subject matter precision", report.subject_matter.precision, want.subject_matter.0)?;
    close("subject matter recall", report.subject_matter.recall, want.subject_matter.1)?;
    close("action & pose precision", report.action_pose.precision, want.action_pose.0)?;
    close("action & pose recall", report.action_pose.recall, want.action_pose.1)?;
    if report.theme_mood_images != 3 {
        return Err(format!("theme & mood scored on {} images, expected 3", report.theme_mood_images));
    }
    close("theme & mood similarity", report.theme_mood_similarity.unwrap_or(f64::NAN), want.theme_mood)
}

/// Manifest of five images with exactly three keywords each, so every
/// sampled set is the image's full keyword list, and mutually orthogonal
/// descriptions.
pub fn diversity_manifest() -> Manifest {
    let rows = [
        ("dog", "running", "calm"),
        ("cat", "sitting", "happy"),
        ("tree", "jumping", "joyful"),
        ("bush", "running", "happy"),
        ("kitten", "sitting", "calm"),
    ];
    let mut text = String::new();
    for (i, (sm, ap, tm)) in rows.iter().enumerate() {
        text.push_str(&format!(
            "{{\"image_path\": \"img{i}.png\", \"subject_matter\": [\"{sm}\"], \"action_pose\": [\"{ap}\"], \"theme_mood\": [\"{tm}\"], \"description\": \"description {i}\"}}\n"
        ));
    }
    Manifest::parse(&text, Path::new(".")).expect("fixture manifest parses")
}

/// Replays three fixed captions per keyword set. Captions sit at
/// (1,0), (0,1), (1,1) in the first two axes: pairwise cosines 0, 1/√2,
/// 1/√2. The stub paraphrase of the first caption sits at (1,1), and
/// descriptions are orthogonal to everything.
pub fn diversity_bundle(manifest: &Manifest) -> ProviderBundle {
    let kit = PromptKit::new(Arc::new(TemplateLibrary::builtin()));
    let mut chat = ReplayChat::default();
    let dim = 2 + manifest.len();
    let mut emb = TableEmbedder::new();
    for (i, img) in manifest.images.iter().enumerate() {
        let req = kit.build_recombination_request(&img.truth).expect("fixture sets have subjects");
        let captions = [format!("Scene {i} alpha."), format!("Scene {i} beta."), format!("Scene {i} gamma.")];
        let answer = captions
            .iter()
            .enumerate()
            .map(|(k, c)| format!("{}.\nCaption: {c}\nObjects: [(thing, a thing)]", k + 1))
            .collect::<Vec<_>>()
            .join("\n\n");
        chat.insert(TemplateId::Recombine, req.user_turn(), answer);
        let mut a = vec![0.0; dim];
        a[0] = 1.0;
        let mut b = vec![0.0; dim];
        b[1] = 1.0;
        let mut ab = vec![0.0; dim];
        ab[0] = 1.0;
        ab[1] = 1.0;
        emb.insert(captions[0].clone(), a);
        emb.insert(captions[1].clone(), b);
        emb.insert(captions[2].clone(), ab.clone());
        emb.insert(format!("in other words, {}", captions[0]), ab);
        emb.insert(img.description.clone().expect("fixture has descriptions"), e(2 + i, dim));
    }
    let mut bundle = ProviderBundle::stub();
    bundle.chat = Arc::new(chat);
    bundle.embedder = Arc::new(emb);
    bundle
}

pub struct DiversityExpectation {
    pub random: (f64, f64),
    pub generated: (f64, f64),
    pub paraphrase: (f64, f64),
}

/// `(similarity, diversity)` per group.
pub fn diversity_expectation() -> DiversityExpectation {
    let r2 = 2f64.sqrt();
    DiversityExpectation {
        random: (0.0, 1.0),
        generated: (r2 / 3.0, 1.0 - r2 / 3.0),
        paraphrase: ((r2 + 1.0) / 3.0, (2.0 - r2) / 3.0),
    }
}

pub async fn check_diversity() -> Result<Vec<u8>, String> {
    let manifest = diversity_manifest();
    let params = EvalParams { seed: 11, n_sets: 5, ..EvalParams::default() };
    let eval = Evaluator::new(diversity_bundle(&manifest), params);
    let report = eval.diversity(&manifest).await.map_err(|e| e.to_string())?;
    report.check().map_err(|issues| issues.join("; "))?;
    let d = report.diversity.as_ref().expect("diversity section");
    if d.sets.len() != 5 || !d.skipped.is_empty() || d.aborted.is_some() {
        return Err(format!("sets {} skipped {:?} aborted {:?}", d.sets.len(), d.skipped, d.aborted));
    }
    let want = diversity_expectation();
    for (name, got, want) in [
        ("random", d.random, want.random),
        ("generated", d.generated, want.generated),
        ("paraphrase", d.paraphrase, want.paraphrase),
    ] {
        let got = got.ok_or_else(|| format!("{name} missing"))?;
        close(&format!("{name} similarity"), got.similarity, want.0)?;
        close(&format!("{name} diversity"), got.diversity, want.1)?;
    }
    Ok(report.to_json_bytes())
}
