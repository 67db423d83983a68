//! Chat prompts for the five model calls and parsers for their answers.

mod build;
mod grid;
mod parse;
mod templates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use build::{format_coord, format_layout_response, PromptKit, Sampling};
pub use grid::{plan_grid_crops, CropPlan};
pub use parse::{
    parse_keyword_response, parse_layout_response, parse_layout_response_with_canvas,
    parse_object_list, parse_recombination_response, DraftText, LayoutEntry, ParsedDrafts,
};
pub use templates::{Template, TemplateLibrary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    Extract,
    Recommend,
    Recombine,
    MatchLayout,
    GenLayout,
    /// Keyword/sentence paraphrasing, used by the evaluation harness.
    Paraphrase,
}

impl TemplateId {
    pub const ALL: [TemplateId; 6] = [
        TemplateId::Extract,
        TemplateId::Recommend,
        TemplateId::Recombine,
        TemplateId::MatchLayout,
        TemplateId::GenLayout,
        TemplateId::Paraphrase,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::Extract => "extract",
            TemplateId::Recommend => "recommend",
            TemplateId::Recombine => "recombine",
            TemplateId::MatchLayout => "match_layout",
            TemplateId::GenLayout => "gen_layout",
            TemplateId::Paraphrase => "paraphrase",
        }
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown template id {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

impl ChatRole {
    pub fn as_str(self) -> &'static str {
        match self {
            ChatRole::System => "system",
            ChatRole::User => "user",
            ChatRole::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: ChatRole,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: ChatRole, content: impl Into<String>) -> Self {
        Self {
            role,
            content: content.into(),
        }
    }
}

/// A fully assembled chat call: system prompt, few-shot turns, live user turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub template_id: TemplateId,
    pub messages: Vec<ChatMessage>,
    pub temperature: f32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl ChatRequest {
    /// The live user turn.
    pub fn user_turn(&self) -> &str {
        self.messages
            .last()
            .map(|m| m.content.as_str())
            .unwrap_or_default()
    }

    pub fn system_prompt(&self) -> &str {
        self.messages
            .first()
            .map(|m| m.content.as_str())
            .unwrap_or_default()
    }

    /// Few-shot (user, assistant) pairs between the system prompt and the
    /// live turn.
    pub fn shots(&self) -> impl Iterator<Item = (&str, &str)> {
        let inner = if self.messages.len() >= 2 {
            &self.messages[1..self.messages.len() - 1]
        } else {
            &[][..]
        };
        inner
            .chunks_exact(2)
            .map(|p| (p[0].content.as_str(), p[1].content.as_str()))
    }

    /// Checks the message shape: system first, alternating user/assistant
    /// pairs, user last.
    pub fn is_well_formed(&self) -> bool {
        let n = self.messages.len();
        if n < 2 || n % 2 != 0 || self.messages[0].role != ChatRole::System {
            return false;
        }
        self.messages[1..].iter().enumerate().all(|(i, m)| {
            let want = if i % 2 == 0 { ChatRole::User } else { ChatRole::Assistant };
            m.role == want
        })
    }
}
