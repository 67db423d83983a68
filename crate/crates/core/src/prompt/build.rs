use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ChatMessage, ChatRequest, ChatRole, TemplateId, TemplateLibrary};
use crate::bbox::BBox;
use crate::error::{CoreError, Result};
use crate::model::{KeywordCategory, KeywordSet};
use crate::scalar::Scalar;

/// Most captions folded into one extraction request (nine cells plus the
/// whole image).
pub const MAX_CAPTIONS: usize = 10;

/// Per-template sampling settings passed through to the chat provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub temperature: f32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl Sampling {
    pub fn new(temperature: f32) -> Self {
        Self { temperature, model: None }
    }

    /// Extraction and layout calls run cold; recombination and
    /// recommendation run hot to spread the drafts apart.
    pub fn default_for(id: TemplateId) -> Self {
        match id {
            TemplateId::Recommend | TemplateId::Recombine => Self::new(0.9),
            TemplateId::Paraphrase => Self::new(0.7),
            TemplateId::Extract | TemplateId::MatchLayout | TemplateId::GenLayout => Self::new(0.2),
        }
    }
}

/// Assembles chat requests from the template library.
#[derive(Debug, Clone)]
pub struct PromptKit {
    library: Arc<TemplateLibrary>,
    sampling: BTreeMap<TemplateId, Sampling>,
}

impl Default for PromptKit {
    fn default() -> Self {
        Self::new(Arc::new(TemplateLibrary::builtin()))
    }
}

impl PromptKit {
    pub fn new(library: Arc<TemplateLibrary>) -> Self {
        let sampling = TemplateId::ALL
            .into_iter()
            .map(|id| (id, Sampling::default_for(id)))
            .collect();
        Self { library, sampling }
    }

    pub fn with_sampling(mut self, id: TemplateId, sampling: Sampling) -> Self {
        self.sampling.insert(id, sampling);
        self
    }

    pub fn library(&self) -> &TemplateLibrary {
        &self.library
    }

    fn request(&self, id: TemplateId, user_turn: String) -> ChatRequest {
        let mut messages = self.library.get(id).preamble();
        messages.push(ChatMessage::new(ChatRole::User, user_turn));
        let sampling = &self.sampling[&id];
        ChatRequest {
            template_id: id,
            messages,
            temperature: sampling.temperature,
            model: sampling.model.clone(),
        }
    }

    /// User turn: the captions, one per line.
    pub fn build_extraction_request<S: AsRef<str>>(&self, captions: &[S]) -> Result<ChatRequest> {
        if captions.is_empty() || captions.len() > MAX_CAPTIONS {
            return Err(CoreError::invalid(format!(
                "extraction takes 1..={MAX_CAPTIONS} captions, got {}",
                captions.len()
            )));
        }
        let mut lines = Vec::with_capacity(captions.len());
        for c in captions {
            lines.push(single_line("caption", c.as_ref())?);
        }
        Ok(self.request(TemplateId::Extract, lines.join("\n")))
    }

    /// User turn: one `Label: a, b` line per non-empty category.
    pub fn build_recommendation_request(&self, selected: &KeywordSet) -> Result<ChatRequest> {
        if selected.is_empty() {
            return Err(CoreError::invalid(
                "select at least one keyword to get recommendations",
            ));
        }
        let lines: Vec<String> = KeywordCategory::TEXTUAL
            .into_iter()
            .filter(|c| !selected.get(*c).is_empty())
            .map(|c| keyword_line(c, selected))
            .collect();
        Ok(self.request(TemplateId::Recommend, lines.join("\n")))
    }

    /// User turn: all three category lines, empty ones included.
    pub fn build_recombination_request(&self, selected: &KeywordSet) -> Result<ChatRequest> {
        if selected.subject_matter.is_empty() {
            return Err(CoreError::invalid(
                "select at least one subject matter keyword; drafts are built around objects",
            ));
        }
        let lines: Vec<String> = KeywordCategory::TEXTUAL
            .into_iter()
            .map(|c| keyword_line(c, selected))
            .collect();
        Ok(self.request(TemplateId::Recombine, lines.join("\n")))
    }

    /// User turn: caption, bracketed object names, then the boxes.
    pub fn build_layout_match_request<S: AsRef<str>, T: Scalar>(
        &self,
        caption: &str,
        object_names: &[S],
        boxes: &[BBox<T>],
    ) -> Result<ChatRequest> {
        if object_names.is_empty() {
            return Err(CoreError::invalid("at least one object is required"));
        }
        if object_names.len() != boxes.len() {
            return Err(CoreError::invalid(format!(
                "{} object names but {} boxes",
                object_names.len(),
                boxes.len()
            )));
        }
        let caption = single_line("caption", caption)?;
        let boxes_line = boxes
            .iter()
            .map(format_box)
            .collect::<Vec<_>>()
            .join(", ");
        let user = format!("{caption}\n{}\n{boxes_line}", name_list(object_names)?);
        Ok(self.request(TemplateId::MatchLayout, user))
    }

    /// User turn: caption and bracketed object names. Repeated names are
    /// allowed.
    pub fn build_layout_gen_request<S: AsRef<str>>(
        &self,
        caption: &str,
        object_names: &[S],
    ) -> Result<ChatRequest> {
        if object_names.is_empty() {
            return Err(CoreError::invalid("at least one object is required"));
        }
        let caption = single_line("caption", caption)?;
        let user = format!("{caption}\n{}", name_list(object_names)?);
        Ok(self.request(TemplateId::GenLayout, user))
    }

    /// User turn: the items to paraphrase, one per line.
    pub fn build_paraphrase_request<S: AsRef<str>>(&self, items: &[S]) -> Result<ChatRequest> {
        if items.is_empty() {
            return Err(CoreError::invalid("nothing to paraphrase"));
        }
        let mut lines = Vec::with_capacity(items.len());
        for it in items {
            lines.push(single_line("paraphrase item", it.as_ref())?);
        }
        Ok(self.request(TemplateId::Paraphrase, lines.join("\n")))
    }
}

fn single_line<'a>(what: &str, s: &'a str) -> Result<&'a str> {
    let t = s.trim();
    if t.is_empty() {
        return Err(CoreError::invalid(format!("{what} must not be empty")));
    }
    if t.contains('\n') || t.contains('\r') {
        return Err(CoreError::invalid(format!("{what} must be a single line")));
    }
    Ok(t)
}

fn keyword_line(category: KeywordCategory, set: &KeywordSet) -> String {
    format!("{}: {}", category.prompt_label(), set.get(category).join(", "))
}

fn name_list<S: AsRef<str>>(names: &[S]) -> Result<String> {
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        out.push(single_line("object name", n.as_ref())?);
    }
    Ok(format!("[{}]", out.join(", ")))
}

/// Three decimals, except that exact 0 and 1 print as `0` and `1`.
pub fn format_coord<T: Scalar>(v: T) -> String {
    let v = v.as_f64();
    if v == 0.0 {
        "0".to_string()
    } else if v == 1.0 {
        "1".to_string()
    } else {
        format!("{v:.3}")
    }
}

fn format_box<T: Scalar>(b: &BBox<T>) -> String {
    format!(
        "[{}, {}, {}, {}]",
        format_coord(b.x),
        format_coord(b.y),
        format_coord(b.w),
        format_coord(b.h)
    )
}

/// Renders a name-to-box assignment in the assistant answer format,
/// e.g. `[('apple', [0.402, 0.138, 0.195, 0.195])]`.
pub fn format_layout_response<S: AsRef<str>, T: Scalar>(entries: &[(S, BBox<T>)]) -> String {
    let items: Vec<String> = entries
        .iter()
        .map(|(name, b)| format!("('{}', {})", name.as_ref(), format_box(b)))
        .collect();
    format!("[{}]", items.join(", "))
}
