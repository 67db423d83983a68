use std::collections::{BTreeSet, HashMap};

use async_trait::async_trait;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recomb_core::blob::sha256_hex;
use recomb_core::model::fold_text;
use recomb_core::prompt::{
    format_layout_response, parse_keyword_response, ChatRequest, TemplateId, TemplateLibrary,
};
use recomb_core::BBox;
use regex::Regex;

use super::seed_of;
use crate::{ChatModel, ChatReply, ProviderError, ProviderResult};

/// Answers requests whose live user turn equals a known few-shot user turn
/// with the matching assistant text. Anything else gets a synthetic answer
/// in the template's output format, flagged as such.
#[derive(Debug, Clone)]
pub struct ReplayChat {
    table: HashMap<(TemplateId, String), String>,
}

impl Default for ReplayChat {
    fn default() -> Self {
        Self::from_library(&TemplateLibrary::builtin())
    }
}

fn key(id: TemplateId, user_turn: &str) -> (TemplateId, String) {
    (id, sha256_hex(user_turn.as_bytes()))
}

impl ReplayChat {
    /// Replay table seeded with every few-shot pair of the library.
    pub fn from_library(library: &TemplateLibrary) -> Self {
        let mut table = HashMap::new();
        for id in TemplateId::ALL {
            for (user, assistant) in &library.get(id).shots {
                table.insert(key(id, user), assistant.clone());
            }
        }
        Self { table }
    }

    pub fn insert(&mut self, id: TemplateId, user_turn: &str, answer: impl Into<String>) {
        self.table.insert(key(id, user_turn), answer.into());
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

#[async_trait]
impl ChatModel for ReplayChat {
    async fn chat(&self, request: &ChatRequest) -> ProviderResult<ChatReply> {
        if !request.is_well_formed() {
            return Err(ProviderError::InvalidInput("malformed chat request".into()));
        }
        let user = request.user_turn();
        if let Some(text) = self.table.get(&key(request.template_id, user)) {
            return Ok(ChatReply { text: text.clone(), synthetic: false });
        }
        Ok(ChatReply {
            text: synthetic_reply(request.template_id, user),
            synthetic: true,
        })
    }

    fn id(&self) -> String {
        "stub-replay-chat".into()
    }
}

const SUBJECTS: [&str; 16] = [
    "lantern", "kite", "harbor", "meadow", "violin", "comet", "teapot", "fox",
    "lighthouse", "bicycle", "owl", "cactus", "umbrella", "whale", "piano", "balloon",
];
const ACTIONS: [&str; 10] = [
    "floating in the air", "running across a field", "reading a book", "sleeping under a tree",
    "dancing", "flying a kite", "waving hello", "climbing a hill", "painting a wall",
    "watching the stars",
];
const THEMES: [&str; 10] = [
    "calm", "whimsical", "nostalgic", "playful", "serene", "mysterious", "cozy", "vibrant",
    "dreamy", "adventurous",
];
const SETTINGS: [&str; 3] = ["In a quiet park", "On a sunny beach", "Inside a cozy studio"];

fn pick<'a>(pool: &[&'a str], n: usize, rng: &mut ChaCha8Rng, exclude: &BTreeSet<String>) -> Vec<&'a str> {
    let mut items: Vec<&str> = pool
        .iter()
        .copied()
        .filter(|p| !exclude.contains(&fold_text(p)))
        .collect();
    items.shuffle(rng);
    items.truncate(n);
    items
}

fn keyword_lines(subject: &[&str], action: &[&str], theme: &[&str]) -> String {
    format!(
        "Subject matter: {}\nAction & pose: {}\nTheme & mood: {}",
        subject.join(", "),
        action.join(", "),
        theme.join(", ")
    )
}

/// Deterministic stand-in answer for a template, shaped like the template's
/// few-shot answers and built from the user turn.
pub fn synthetic_reply(id: TemplateId, user_turn: &str) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_of(&[id.as_str().as_bytes(), user_turn.as_bytes()]));
    match id {
        TemplateId::Extract => {
            let none = BTreeSet::new();
            keyword_lines(
                &pick(&SUBJECTS, 4, &mut rng, &none),
                &pick(&ACTIONS, 1, &mut rng, &none),
                &pick(&THEMES, 2, &mut rng, &none),
            )
        }
        TemplateId::Recommend => {
            let exclude: BTreeSet<String> = parse_keyword_response(user_turn)
                .map(|k| k.texts().iter().map(|t| fold_text(t)).collect())
                .unwrap_or_default();
            keyword_lines(
                &pick(&SUBJECTS, 4, &mut rng, &exclude),
                &pick(&ACTIONS, 3, &mut rng, &exclude),
                &pick(&THEMES, 3, &mut rng, &exclude),
            )
        }
        TemplateId::Recombine => synthetic_drafts(user_turn),
        TemplateId::MatchLayout => synthetic_match(user_turn),
        TemplateId::GenLayout => {
            let names = user_turn.lines().nth(1).map(split_names).unwrap_or_default();
            grid_layout(&names)
        }
        TemplateId::Paraphrase => user_turn
            .lines()
            .map(|l| format!("in other words, {}", l.trim()))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn synthetic_drafts(user_turn: &str) -> String {
    let kws = parse_keyword_response(user_turn).unwrap_or_default();
    let mut subjects = kws.subject_matter.clone();
    if subjects.is_empty() {
        subjects.push("object".into());
    }
    let action = kws.action_pose.first().cloned();
    let theme = kws.theme_mood.first().cloned();
    let mut out = Vec::new();
    for (i, setting) in SETTINGS.iter().enumerate() {
        let take = [3, 2, 3][i].min(subjects.len());
        let names: Vec<&str> = (0..take)
            .map(|k| subjects[(i + k) % subjects.len()].as_str())
            .collect();
        let verb = action.as_deref().unwrap_or("share the scene");
        let mut caption = format!("{setting}, {} {verb}", names.join(" and "));
        if let Some(t) = &theme {
            caption.push_str(&format!(" in a {t} mood"));
        }
        caption.push('.');
        let objects: Vec<String> = names
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let adj = theme.as_deref().unwrap_or(["simple", "small", "bright"][i]);
                match (&action, k) {
                    (Some(a), 0) => format!("({n}, a {adj} {n} {a})"),
                    _ => format!("({n}, a {adj} {n})"),
                }
            })
            .collect();
        out.push(format!("{}.\nScene: {caption}\nObjects: [{}]", i + 1, objects.join(", ")));
    }
    out.join("\n")
}

fn split_names(line: &str) -> Vec<String> {
    line.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .collect()
}

fn synthetic_match(user_turn: &str) -> String {
    let mut lines = user_turn.lines();
    let _caption = lines.next();
    let names = lines.next().map(split_names).unwrap_or_default();
    let numbers: Vec<f64> = {
        let re = Regex::new(r"-?\d+(?:\.\d+)?").expect("valid regex");
        let rest = lines.collect::<Vec<_>>().join(" ");
        re.find_iter(&rest).filter_map(|m| m.as_str().parse().ok()).collect()
    };
    let boxes: Vec<BBox> = numbers
        .chunks_exact(4)
        .map(|c| BBox::new(c[0], c[1], c[2], c[3]))
        .collect();
    if boxes.len() != names.len() || boxes.iter().any(|b| !b.is_valid()) {
        return grid_layout(&names);
    }
    let entries: Vec<(&str, BBox)> = names.iter().map(|n| n.as_str()).zip(boxes).collect();
    format_layout_response(&entries)
}

/// Objects in reading order on a near-square grid, each inset in its cell.
fn grid_layout(names: &[String]) -> String {
    let n = names.len().max(1);
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let (cw, ch) = (1.0 / cols as f64, 1.0 / rows as f64);
    let entries: Vec<(&str, BBox)> = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let (c, r) = ((i % cols) as f64, (i / cols) as f64);
            let b = BBox::new(c * cw + 0.1 * cw, r * ch + 0.1 * ch, 0.8 * cw, 0.8 * ch);
            (name.as_str(), b)
        })
        .collect();
    format_layout_response(&entries)
}
