//! Domain types shared by the pipeline, the board service and the harness.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bbox::{BBox, BBoxViolation};
use crate::blob::{sha256_hex, BlobId};
use crate::error::{CoreError, Result};
use crate::layout::Arrangement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KeywordCategory {
    #[serde(rename = "subject matter")]
    SubjectMatter,
    #[serde(rename = "action & pose")]
    ActionPose,
    #[serde(rename = "theme & mood")]
    ThemeMood,
    #[serde(rename = "arrangement")]
    Arrangement,
}

impl KeywordCategory {
    pub const ALL: [KeywordCategory; 4] = [
        KeywordCategory::SubjectMatter,
        KeywordCategory::ActionPose,
        KeywordCategory::ThemeMood,
        KeywordCategory::Arrangement,
    ];

    /// The three categories carried as text.
    pub const TEXTUAL: [KeywordCategory; 3] = [
        KeywordCategory::SubjectMatter,
        KeywordCategory::ActionPose,
        KeywordCategory::ThemeMood,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KeywordCategory::SubjectMatter => "subject matter",
            KeywordCategory::ActionPose => "action & pose",
            KeywordCategory::ThemeMood => "theme & mood",
            KeywordCategory::Arrangement => "arrangement",
        }
    }

    /// Line label used in prompts, e.g. `Subject matter`.
    pub fn prompt_label(self) -> &'static str {
        match self {
            KeywordCategory::SubjectMatter => "Subject matter",
            KeywordCategory::ActionPose => "Action & pose",
            KeywordCategory::ThemeMood => "Theme & mood",
            KeywordCategory::Arrangement => "Arrangement",
        }
    }

    pub fn is_textual(self) -> bool {
        self != KeywordCategory::Arrangement
    }
}

impl fmt::Display for KeywordCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordSource {
    Extracted,
    Recommended,
    Manual,
}

/// Trims and collapses internal whitespace. Casing is kept.
pub fn normalize_text(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Key used for duplicate detection.
pub fn fold_text(s: &str) -> String {
    normalize_text(s).to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub id: String,
    pub category: KeywordCategory,
    /// Display text; empty for arrangement keywords.
    pub text: String,
    pub source: KeywordSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_image: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrangement_id: Option<String>,
}

impl Keyword {
    pub fn textual(
        id: impl Into<String>,
        category: KeywordCategory,
        text: &str,
        source: KeywordSource,
    ) -> Result<Self> {
        if !category.is_textual() {
            return Err(CoreError::invalid(
                "arrangement keywords carry an arrangement, not text",
            ));
        }
        let text = normalize_text(text);
        if text.is_empty() {
            return Err(CoreError::invalid("keyword text must not be empty"));
        }
        Ok(Self {
            id: id.into(),
            category,
            text,
            source,
            source_image: None,
            arrangement_id: None,
        })
    }

    pub fn arrangement(
        id: impl Into<String>,
        source_image: impl Into<String>,
        arrangement_id: impl Into<String>,
        source: KeywordSource,
    ) -> Self {
        Self {
            id: id.into(),
            category: KeywordCategory::Arrangement,
            text: String::new(),
            source,
            source_image: Some(source_image.into()),
            arrangement_id: Some(arrangement_id.into()),
        }
    }

    pub fn with_source_image(mut self, image: impl Into<String>) -> Self {
        self.source_image = Some(image.into());
        self
    }

    /// Identity for duplicate detection within a board.
    pub fn dedup_key(&self) -> (KeywordCategory, String) {
        match self.category {
            KeywordCategory::Arrangement => (
                self.category,
                self.arrangement_id.clone().unwrap_or_default(),
            ),
            c => (c, fold_text(&self.text)),
        }
    }
}

/// Keywords grouped by textual category. Entries are normalized and unique
/// per category, compared case-insensitively.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    #[serde(default)]
    pub subject_matter: Vec<String>,
    #[serde(default)]
    pub action_pose: Vec<String>,
    #[serde(default)]
    pub theme_mood: Vec<String>,
}

impl KeywordSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_lists<S: AsRef<str>>(subject: &[S], action: &[S], theme: &[S]) -> Self {
        let mut set = Self::new();
        for s in subject {
            set.insert(KeywordCategory::SubjectMatter, s.as_ref());
        }
        for s in action {
            set.insert(KeywordCategory::ActionPose, s.as_ref());
        }
        for s in theme {
            set.insert(KeywordCategory::ThemeMood, s.as_ref());
        }
        set
    }

    pub fn get(&self, category: KeywordCategory) -> &[String] {
        match category {
            KeywordCategory::SubjectMatter => &self.subject_matter,
            KeywordCategory::ActionPose => &self.action_pose,
            KeywordCategory::ThemeMood => &self.theme_mood,
            KeywordCategory::Arrangement => &[],
        }
    }

    fn get_mut(&mut self, category: KeywordCategory) -> Option<&mut Vec<String>> {
        match category {
            KeywordCategory::SubjectMatter => Some(&mut self.subject_matter),
            KeywordCategory::ActionPose => Some(&mut self.action_pose),
            KeywordCategory::ThemeMood => Some(&mut self.theme_mood),
            KeywordCategory::Arrangement => None,
        }
    }

    /// Adds a keyword unless it is empty or already present. Returns whether
    /// the set changed.
    pub fn insert(&mut self, category: KeywordCategory, text: &str) -> bool {
        let text = normalize_text(text);
        if text.is_empty() {
            return false;
        }
        let Some(list) = self.get_mut(category) else {
            return false;
        };
        let key = text.to_lowercase();
        if list.iter().any(|t| t.to_lowercase() == key) {
            return false;
        }
        list.push(text);
        true
    }

    pub fn len(&self) -> usize {
        self.subject_matter.len() + self.action_pose.len() + self.theme_mood.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (KeywordCategory, &str)> + '_ {
        KeywordCategory::TEXTUAL
            .into_iter()
            .flat_map(move |c| self.get(c).iter().map(move |t| (c, t.as_str())))
    }

    pub fn texts(&self) -> Vec<String> {
        self.iter().map(|(_, t)| t.to_string()).collect()
    }

    /// Copy without any entry whose folded text appears anywhere in `other`.
    pub fn without(&self, other: &KeywordSet) -> KeywordSet {
        let taken: HashSet<String> = other.iter().map(|(_, t)| fold_text(t)).collect();
        let mut out = KeywordSet::new();
        for (c, t) in self.iter() {
            if !taken.contains(&fold_text(t)) {
                out.insert(c, t);
            }
        }
        out
    }

    pub fn extend(&mut self, other: &KeywordSet) {
        for (c, t) in other.iter() {
            self.insert(c, t);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftObject {
    pub name: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutSlot {
    pub object_name: String,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sketch {
    /// Position in the sequence of layout ranks requested for this draft;
    /// 0 is the initial sketch.
    pub rank: usize,
    /// Index into the draft's ranked layout list that produced the sketch.
    pub layout_index: usize,
    pub blob: BlobId,
    pub layout: Vec<LayoutSlot>,
}

/// One recombination draft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recombination {
    pub id: String,
    pub caption: String,
    pub objects: Vec<DraftObject>,
    /// Absent until a layout is resolved.
    pub layout: Option<Vec<LayoutSlot>>,
    /// Candidate box sets, best first. Used for further sketches.
    #[serde(default)]
    pub ranked_layouts: Vec<Vec<BBox>>,
    #[serde(default)]
    pub sketches: Vec<Sketch>,
    #[serde(default)]
    pub layout_rank_used: usize,
    #[serde(default)]
    pub completed: bool,
}

impl Recombination {
    pub fn new(id: impl Into<String>, caption: impl Into<String>, objects: Vec<DraftObject>) -> Self {
        Self {
            id: id.into(),
            caption: caption.into(),
            objects,
            layout: None,
            ranked_layouts: Vec::new(),
            sketches: Vec::new(),
            layout_rank_used: 0,
            completed: false,
        }
    }

    pub fn object_names(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.name.clone()).collect()
    }

    /// Checks that a resolved layout has one valid box per object and that
    /// the names agree as multisets.
    pub fn check_layout(&self) -> std::result::Result<(), String> {
        let Some(layout) = &self.layout else {
            return Ok(());
        };
        check_slots(&self.object_names(), layout)
    }
}

/// Multiset comparison of object names against a slot list, plus box validity.
pub fn check_slots(names: &[String], slots: &[LayoutSlot]) -> std::result::Result<(), String> {
    if names.len() != slots.len() {
        return Err(format!(
            "{} objects but {} layout boxes",
            names.len(),
            slots.len()
        ));
    }
    let mut a: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b: Vec<&str> = slots.iter().map(|s| s.object_name.as_str()).collect();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(format!("layout names {b:?} do not match objects {a:?}"));
    }
    for s in slots {
        s.bbox
            .validate()
            .map_err(|v: BBoxViolation| format!("box for {}: {v}", s.object_name))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub id: String,
    pub image: BlobId,
    pub keywords: KeywordSet,
    #[serde(default)]
    pub arrangement: Option<Arrangement>,
    #[serde(default)]
    pub captions: Vec<String>,
    #[serde(default)]
    pub degraded: bool,
    /// Opaque client-side placement on the mood board.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    AddReference,
    AddKeyword,
    SelectKeyword,
    Recommend,
    Merge,
    MoreSketches,
    CompleteSketch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub timestamp_ms: u64,
    pub kind: ActionKind,
    /// SHA-256 of the JSON payload describing the action.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Board {
    pub id: String,
    pub created_ms: u64,
    #[serde(default)]
    pub references: Vec<Reference>,
    /// Every keyword on the board, whatever its source.
    #[serde(default)]
    pub keywords: Vec<Keyword>,
    /// Ids of the selected keywords, in selection order.
    #[serde(default)]
    pub selected_keywords: Vec<String>,
    #[serde(default)]
    pub drafts: Vec<Recombination>,
    #[serde(default)]
    pub action_log: Vec<ActionRecord>,
    #[serde(default)]
    next_seq: u64,
}

impl Board {
    pub fn new(id: impl Into<String>, created_ms: u64) -> Self {
        Self {
            id: id.into(),
            created_ms,
            references: Vec::new(),
            keywords: Vec::new(),
            selected_keywords: Vec::new(),
            drafts: Vec::new(),
            action_log: Vec::new(),
            next_seq: 0,
        }
    }

    /// Board-local id such as `kw-3`.
    pub fn fresh_id(&mut self, prefix: &str) -> String {
        self.next_seq += 1;
        format!("{prefix}-{}", self.next_seq)
    }

    pub fn keyword(&self, id: &str) -> Option<&Keyword> {
        self.keywords.iter().find(|k| k.id == id)
    }

    pub fn reference(&self, id: &str) -> Option<&Reference> {
        self.references.iter().find(|r| r.id == id)
    }

    pub fn arrangement(&self, id: &str) -> Option<&Arrangement> {
        self.references
            .iter()
            .filter_map(|r| r.arrangement.as_ref())
            .find(|a| a.id == id)
    }

    pub fn draft(&self, id: &str) -> Option<&Recombination> {
        self.drafts.iter().find(|d| d.id == id)
    }

    pub fn draft_mut(&mut self, id: &str) -> Option<&mut Recombination> {
        self.drafts.iter_mut().find(|d| d.id == id)
    }

    /// Inserts a keyword unless an equal one exists, assigning it a fresh id.
    /// Returns the id of the stored keyword and whether it was new.
    pub fn add_keyword(&mut self, mut kw: Keyword) -> Result<(String, bool)> {
        if kw.category == KeywordCategory::Arrangement {
            let arr = kw.arrangement_id.as_deref().unwrap_or_default();
            if self.arrangement(arr).is_none() {
                return Err(CoreError::invalid(format!("unknown arrangement {arr:?}")));
            }
        }
        let key = kw.dedup_key();
        if let Some(existing) = self.keywords.iter().find(|k| k.dedup_key() == key) {
            return Ok((existing.id.clone(), false));
        }
        kw.id = self.fresh_id("kw");
        let id = kw.id.clone();
        self.keywords.push(kw);
        Ok((id, true))
    }

    pub fn select(&mut self, id: &str) -> bool {
        if self.selected_keywords.iter().any(|s| s == id) {
            return false;
        }
        self.selected_keywords.push(id.to_string());
        true
    }

    pub fn deselect(&mut self, id: &str) -> bool {
        let before = self.selected_keywords.len();
        self.selected_keywords.retain(|s| s != id);
        before != self.selected_keywords.len()
    }

    pub fn selected(&self) -> Vec<&Keyword> {
        self.selected_keywords
            .iter()
            .filter_map(|id| self.keyword(id))
            .collect()
    }

    /// Groups the given keywords into a set, returning the first arrangement
    /// keyword's arrangement alongside.
    pub fn gather<'a>(
        &'a self,
        keywords: impl IntoIterator<Item = &'a Keyword>,
    ) -> (KeywordSet, Option<&'a Arrangement>) {
        let mut set = KeywordSet::new();
        let mut arrangement = None;
        for kw in keywords {
            if kw.category == KeywordCategory::Arrangement {
                if arrangement.is_none() {
                    arrangement = kw.arrangement_id.as_deref().and_then(|a| self.arrangement(a));
                }
            } else {
                set.insert(kw.category, &kw.text);
            }
        }
        (set, arrangement)
    }

    /// Appends a log record. Timestamps never go backwards, even if the clock
    /// does.
    pub fn log(&mut self, kind: ActionKind, payload: &serde_json::Value, now_ms: u64) {
        let last = self.action_log.last().map_or(0, |r| r.timestamp_ms);
        let digest = sha256_hex(payload.to_string().as_bytes());
        self.action_log.push(ActionRecord {
            timestamp_ms: now_ms.max(last),
            kind,
            digest,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_serializes_to_exact_strings() {
        let names: Vec<String> = KeywordCategory::ALL
            .iter()
            .map(|c| serde_json::to_string(c).unwrap())
            .collect();
        assert_eq!(
            names,
            [
                "\"subject matter\"",
                "\"action & pose\"",
                "\"theme & mood\"",
                "\"arrangement\""
            ]
        );
        let back: KeywordCategory = serde_json::from_str("\"action & pose\"").unwrap();
        assert_eq!(back, KeywordCategory::ActionPose);
    }

    #[test]
    fn keyword_text_is_normalized_but_keeps_case() {
        let kw = Keyword::textual("k", KeywordCategory::SubjectMatter, "  Eiffel   tower ", KeywordSource::Manual)
            .unwrap();
        assert_eq!(kw.text, "Eiffel tower");
        assert_eq!(kw.dedup_key().1, "eiffel tower");
        assert!(Keyword::textual("k", KeywordCategory::ThemeMood, "   ", KeywordSource::Manual).is_err());
        assert!(Keyword::textual("k", KeywordCategory::Arrangement, "x", KeywordSource::Manual).is_err());
    }

    #[test]
    fn keyword_set_dedups_case_insensitively() {
        let mut set = KeywordSet::new();
        assert!(set.insert(KeywordCategory::SubjectMatter, "Cat"));
        assert!(!set.insert(KeywordCategory::SubjectMatter, "cat"));
        assert!(!set.insert(KeywordCategory::SubjectMatter, ""));
        assert!(set.insert(KeywordCategory::ThemeMood, "cat"));
        assert_eq!(set.len(), 2);
        let other = KeywordSet::from_lists(&["CAT"], &[], &[]);
        assert!(set.without(&other).is_empty());
    }

    #[test]
    fn board_dedup_insert_is_a_no_op() {
        let mut board = Board::new("b", 0);
        let kw = Keyword::textual("", KeywordCategory::SubjectMatter, "dog", KeywordSource::Manual).unwrap();
        let (id1, new1) = board.add_keyword(kw.clone()).unwrap();
        let snapshot = board.keywords.clone();
        let mut again = kw;
        again.text = "DOG".into();
        let (id2, new2) = board.add_keyword(again).unwrap();
        assert!(new1 && !new2);
        assert_eq!(id1, id2);
        assert_eq!(board.keywords, snapshot);
    }

    #[test]
    fn arrangement_keyword_needs_stored_arrangement() {
        let mut board = Board::new("b", 0);
        let kw = Keyword::arrangement("", "img", "missing", KeywordSource::Manual);
        assert!(board.add_keyword(kw).is_err());
    }

    #[test]
    fn log_timestamps_are_monotone() {
        let mut board = Board::new("b", 0);
        board.log(ActionKind::AddKeyword, &serde_json::json!({"a": 1}), 100);
        board.log(ActionKind::SelectKeyword, &serde_json::json!({"a": 2}), 50);
        assert_eq!(board.action_log[1].timestamp_ms, 100);
        assert_eq!(board.action_log[0].digest.len(), 64);
    }

    #[test]
    fn layout_check_is_a_multiset_comparison() {
        let mut d = Recombination::new(
            "d",
            "c",
            vec![
                DraftObject { name: "apple".into(), detail: String::new() },
                DraftObject { name: "apple".into(), detail: String::new() },
                DraftObject { name: "table".into(), detail: String::new() },
            ],
        );
        let slot = |n: &str| LayoutSlot { object_name: n.into(), bbox: BBox::new(0.1, 0.1, 0.2, 0.2) };
        d.layout = Some(vec![slot("table"), slot("apple"), slot("apple")]);
        assert!(d.check_layout().is_ok());
        d.layout = Some(vec![slot("table"), slot("table"), slot("apple")]);
        assert!(d.check_layout().is_err());
        d.layout = Some(vec![slot("table"), slot("apple")]);
        assert!(d.check_layout().is_err());
    }
}
