mod common;

use common::oracle;
use proptest::prelude::*;
use recomb_eval::{
    band_set, cosine, diversity, greedy_matches, match_pr, match_pr_vectors, mean_embedding_similarity,
    EvalParams, Evaluator, Manifest,
};
use recomb_providers::stub::{HashEmbedder, TableEmbedder};
use recomb_providers::ProviderBundle;

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Largest one-to-one matching among pairs at or above the threshold, by
/// trying every assignment of predicted items.
fn brute_force_max(sim: &[Vec<f64>], threshold: f64) -> usize {
    fn go(sim: &[Vec<f64>], threshold: f64, row: usize, used: &mut Vec<bool>) -> usize {
        if row == sim.len() {
            return 0;
        }
        let mut best = go(sim, threshold, row + 1, used);
        for j in 0..used.len() {
            if !used[j] && sim[row][j] >= threshold {
                used[j] = true;
                best = best.max(1 + go(sim, threshold, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    let cols = sim.first().map_or(0, Vec::len);
    go(sim, threshold, 0, &mut vec![false; cols])
}

#[tokio::test]
async fn keyword_scores_match_the_hand_oracle() {
    oracle::check_keywords().await.unwrap();
}

#[tokio::test]
async fn diversity_matches_the_hand_oracle_and_is_reproducible() {
    let a = oracle::check_diversity().await.unwrap();
    let b = oracle::check_diversity().await.unwrap();
    assert_eq!(a, b);
}

#[tokio::test]
async fn match_pr_small_cases() {
    let exact = TableEmbedder::new()
        .with("a", vec![1.0, 0.0, 0.0])
        .with("b", vec![0.0, 1.0, 0.0])
        .with("c", vec![0.0, 0.0, 1.0]);
    let pr = match_pr(&exact, &strings(&["a", "b"]), &strings(&["a", "c"]), 0.6).await.unwrap();
    assert_eq!((pr.precision, pr.recall), (0.5, 0.5));
    let pr = match_pr(&exact, &strings(&["a", "b"]), &strings(&["a", "b"]), 0.6).await.unwrap();
    assert_eq!((pr.precision, pr.recall), (1.0, 1.0));
    let pr = match_pr(&exact, &[], &[], 0.6).await.unwrap();
    assert_eq!((pr.precision, pr.recall), (1.0, 1.0));
    assert!(match_pr(&exact, &strings(&["a"]), &strings(&["a"]), 0.0).await.is_err());
    assert!(match_pr(&exact, &strings(&["a"]), &strings(&["a"]), 1.5).await.is_err());
}

#[test]
fn three_of_six_all_matched_and_greedy_is_optimal() {
    // Predicted i sits halfway between truths 2i and 2i+1.
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for i in 0..3 {
        let mut p = vec![0.0; 6];
        p[2 * i] = 1.0;
        p[2 * i + 1] = 1.0;
        predicted.push(p);
        for k in 0..2 {
            let mut t = vec![0.0; 6];
            t[2 * i + k] = 1.0;
            truth.push(t);
        }
    }
    let pr = match_pr_vectors(&predicted, &truth, 0.6);
    assert_eq!((pr.precision, pr.recall), (1.0, 0.5));
    let sim: Vec<Vec<f64>> = predicted.iter().map(|p| truth.iter().map(|t| cosine(p, t)).collect()).collect();
    assert_eq!(brute_force_max(&sim, 0.6), 3);
    assert_eq!(greedy_matches(&sim, 0.6).len(), 3);
}

#[tokio::test]
async fn mean_embedding_similarity_two_vector_case() {
    let emb = TableEmbedder::new()
        .with("u1", vec![1.0, 2.0, 2.0])
        .with("u2", vec![0.0, 3.0, 4.0])
        .with("v", vec![2.0, 1.0, 0.0]);
    let got = mean_embedding_similarity(&emb, &strings(&["u1", "u2"]), &strings(&["v"])).await.unwrap();
    // Plain dot products on the normalized inputs.
    let u1 = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
    let u2 = [0.0, 0.6, 0.8];
    let s5 = 5f64.sqrt();
    let v = [2.0 / s5, 1.0 / s5, 0.0];
    let m = [(u1[0] + u2[0]) / 2.0, (u1[1] + u2[1]) / 2.0, (u1[2] + u2[2]) / 2.0];
    let dot = m[0] * v[0] + m[1] * v[1] + m[2] * v[2];
    let nm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    assert!((got - dot / nm).abs() < 1e-12);
    assert_eq!(mean_embedding_similarity(&emb, &strings(&["u1"]), &strings(&["u1"])).await.unwrap(), 1.0);
    let orth = TableEmbedder::new().with("x", vec![1.0, 0.0]).with("y", vec![0.0, 1.0]);
    assert_eq!(mean_embedding_similarity(&orth, &strings(&["x"]), &strings(&["y"])).await.unwrap(), 0.0);
    assert!(mean_embedding_similarity(&emb, &[], &strings(&["v"])).await.is_err());
}

#[tokio::test]
async fn diversity_extremes() {
    let emb = HashEmbedder::default();
    let same = strings(&["a red kite", "a red kite", "a red kite"]);
    assert_eq!(diversity(&emb, &same).await.unwrap().diversity, 0.0);
    let orth = TableEmbedder::new()
        .with("x", vec![1.0, 0.0, 0.0])
        .with("y", vec![0.0, 1.0, 0.0])
        .with("z", vec![0.0, 0.0, 1.0]);
    assert_eq!(diversity(&orth, &strings(&["x", "y", "z"])).await.unwrap().diversity, 1.0);
}

#[tokio::test]
async fn banding_identity_recommender_and_disjoint_controls() {
    let emb = TableEmbedder::new()
        .with("owl", vec![1.0, 0.0, 0.0, 0.0])
        .with("night", vec![0.0, 1.0, 0.0, 0.0])
        .with("brick", vec![0.0, 0.0, 1.0, 0.0])
        .with("owlet", vec![1.0, 0.0, 0.0, 0.2]);
    let originals = strings(&["owl", "night"]);
    let (irr, rec, syn) =
        band_set(&emb, &originals, &originals, &strings(&["brick"]), &strings(&["owlet"])).await.unwrap();
    assert!((rec - 1.0).abs() < 1e-12);
    assert_eq!(irr, 0.0);
    assert!(syn > irr && syn < rec);
}

fn stub_manifest(dir: &std::path::Path, n: usize) -> Manifest {
    let mut text = String::new();
    for i in 0..n {
        let img = image::RgbImage::from_fn(48 + i as u32 * 8, 40, |x, y| {
            image::Rgb([(x * 5) as u8, (y * 6) as u8, (i * 40) as u8])
        });
        img.save(dir.join(format!("{i}.png"))).unwrap();
        text.push_str(&format!(
            "{{\"image_path\": \"{i}.png\", \"subject_matter\": [\"dog\", \"ball {i}\", \"grass\"], \"action_pose\": [\"running\", \"fetching\"], \"theme_mood\": [\"playful\", \"sunny\"], \"description\": \"A dog number {i} fetches a ball.\"}}\n"
        ));
    }
    text.push_str("{\"image_path\": \"missing.png\", \"subject_matter\": [\"ghost\"]}\n");
    std::fs::write(dir.join("manifest.jsonl"), &text).unwrap();
    Manifest::load(&dir.join("manifest.jsonl")).unwrap()
}

#[tokio::test]
async fn stub_runs_are_valid_and_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = stub_manifest(dir.path(), 5);
    let params = EvalParams { seed: 5, n_sets: 6, ..EvalParams::default() };
    for kind in ["keywords", "recommend", "diversity"] {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let eval = Evaluator::new(ProviderBundle::stub(), params);
            let report = match kind {
                "keywords" => eval.keywords(&manifest).await,
                "recommend" => eval.recommend(&manifest).await,
                _ => eval.diversity(&manifest).await,
            }
            .unwrap();
            report.check().unwrap();
            assert_eq!(report.metadata.match_threshold, 0.6);
            assert_eq!(report.metadata.providers.len(), 6);
            outputs.push(report.to_json_bytes());
        }
        assert_eq!(outputs[0], outputs[1], "{kind} report differs between runs");
    }

    let eval = Evaluator::new(ProviderBundle::stub(), params);
    let report = eval.keywords(&manifest).await.unwrap();
    let k = report.keywords.unwrap();
    assert_eq!(k.images.len(), 6);
    assert!(k.images[5].error.is_some());
    assert!(k.images[..5].iter().all(|i| i.error.is_none() && i.predicted.is_some()));

    let report = eval.recommend(&manifest).await.unwrap();
    let b = report.banding.unwrap();
    assert_eq!(b.sets.len() + b.skipped.len(), 6);
    assert!(b.aborted.is_none());
}

proptest! {
    #[test]
    fn greedy_is_maximal_and_within_half_of_optimal(
        sim in proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, 1..5), 1..5),
        threshold in 0.05f64..1.0,
    ) {
        let cols = sim[0].len();
        let sim: Vec<Vec<f64>> = sim.into_iter().map(|mut r| { r.resize(cols, 0.0); r }).collect();
        let m = greedy_matches(&sim, threshold);
        let best = brute_force_max(&sim, threshold);
        prop_assert!(m.len() <= best);
        prop_assert!(2 * m.len() >= best);
        let rows: Vec<usize> = m.iter().map(|p| p.0).collect();
        let used_cols: Vec<usize> = m.iter().map(|p| p.1).collect();
        for (i, row) in sim.iter().enumerate() {
            for (j, &s) in row.iter().enumerate() {
                if s >= threshold {
                    prop_assert!(rows.contains(&i) || used_cols.contains(&j));
                }
            }
        }
    }

    #[test]
    fn match_pr_is_symmetric(
        p in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 4), 0..6),
        t in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 4), 0..6),
        threshold in 0.05f64..1.0,
    ) {
        let a = match_pr_vectors(&p, &t, threshold);
        let b = match_pr_vectors(&t, &p, threshold);
        prop_assert_eq!(a.precision, b.recall);
        prop_assert_eq!(a.recall, b.precision);
        prop_assert!((0.0..=1.0).contains(&a.precision) && (0.0..=1.0).contains(&a.recall));
    }
}
