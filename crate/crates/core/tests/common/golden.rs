//! Expected typed values for every few-shot answer bundled with the prompt
//! templates, and a checker that parses each answer and compares.

use std::path::Path;

use recomb_core::prompt::{
    parse_keyword_response, parse_layout_response, parse_recombination_response, TemplateId,
    TemplateLibrary,
};
use serde::Deserialize;

pub const LAYOUT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Deserialize)]
pub struct Corpus {
    pub keywords: Vec<KeywordCase>,
    pub drafts: Vec<DraftCase>,
    pub layouts: Vec<LayoutCase>,
}

#[derive(Debug, Deserialize)]
pub struct KeywordCase {
    pub template: TemplateId,
    pub shot: usize,
    pub subject_matter: Vec<String>,
    pub action_pose: Vec<String>,
    pub theme_mood: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct DraftCase {
    pub template: TemplateId,
    pub shot: usize,
    pub drafts: Vec<ExpectedDraft>,
}

#[derive(Debug, Deserialize)]
pub struct ExpectedDraft {
    pub caption: String,
    pub objects: Vec<(String, String)>,
}

#[derive(Debug, Deserialize)]
pub struct LayoutCase {
    pub template: TemplateId,
    pub shot: usize,
    pub entries: Vec<(String, [f64; 4], bool)>,
}

pub fn load() -> Corpus {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden/corpus.json");
    let text = std::fs::read_to_string(&path).expect("golden corpus present");
    serde_json::from_str(&text).expect("golden corpus is valid JSON")
}

fn answer(lib: &TemplateLibrary, id: TemplateId, shot: usize) -> Result<&str, String> {
    lib.get(id)
        .shots
        .get(shot)
        .map(|(_, a)| a.as_str())
        .ok_or_else(|| format!("{id} has no shot {shot}"))
}

/// Parses every answer named in the corpus. Returns the number of answers
/// checked, or the first mismatch.
pub fn check(lib: &TemplateLibrary, corpus: &Corpus) -> Result<usize, String> {
    let mut checked = 0;
    for case in &corpus.keywords {
        let text = answer(lib, case.template, case.shot)?;
        let got = parse_keyword_response(text)
            .map_err(|e| format!("{} #{}: {e}", case.template, case.shot))?;
        let want = (&case.subject_matter, &case.action_pose, &case.theme_mood);
        if (&got.subject_matter, &got.action_pose, &got.theme_mood) != want {
            return Err(format!("{} #{}: got {got:?}", case.template, case.shot));
        }
        checked += 1;
    }
    for case in &corpus.drafts {
        let text = answer(lib, case.template, case.shot)?;
        let got = parse_recombination_response(text)
            .map_err(|e| format!("{} #{}: {e}", case.template, case.shot))?;
        if got.degraded || got.drafts.len() != case.drafts.len() {
            return Err(format!("{} #{}: got {got:?}", case.template, case.shot));
        }
        for (g, w) in got.drafts.iter().zip(&case.drafts) {
            let objects: Vec<(String, String)> = g
                .objects
                .iter()
                .map(|o| (o.name.clone(), o.detail.clone()))
                .collect();
            if g.caption != w.caption || objects != w.objects {
                return Err(format!("{} #{}: got {g:?}", case.template, case.shot));
            }
        }
        checked += 1;
    }
    for case in &corpus.layouts {
        let text = answer(lib, case.template, case.shot)?;
        let got = parse_layout_response(text)
            .map_err(|e| format!("{} #{}: {e}", case.template, case.shot))?;
        if got.len() != case.entries.len() {
            return Err(format!("{} #{}: got {got:?}", case.template, case.shot));
        }
        for (g, (name, b, clamped)) in got.iter().zip(&case.entries) {
            let close = g
                .bbox
                .to_array()
                .iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= LAYOUT_TOLERANCE);
            if &g.name != name || !close || g.clamped != *clamped || g.pixel_input {
                return Err(format!("{} #{}: got {g:?}", case.template, case.shot));
            }
        }
        checked += 1;
    }
    Ok(checked)
}
