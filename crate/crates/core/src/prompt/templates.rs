use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{ChatMessage, ChatRole, TemplateId};
use crate::error::{CoreError, Result};

/// System prompt plus few-shot (user, assistant) pairs.
///
/// On disk a template is UTF-8 text made of sections introduced by a
/// `### system`, `### user` or `### assistant` line. A section's text runs to
/// the next header; the newline ending its last line is not part of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub id: TemplateId,
    pub system: String,
    pub shots: Vec<(String, String)>,
}

impl Template {
    pub fn parse(id: TemplateId, text: &str) -> Result<Self> {
        let mut sections: Vec<(ChatRole, Vec<&str>)> = Vec::new();
        for line in text.split('\n') {
            if let Some(role) = line.strip_prefix("### ") {
                let role = match role.trim_end() {
                    "system" => ChatRole::System,
                    "user" => ChatRole::User,
                    "assistant" => ChatRole::Assistant,
                    other => {
                        return Err(CoreError::Template(format!(
                            "{id}: unknown section header {other:?}"
                        )))
                    }
                };
                sections.push((role, Vec::new()));
            } else if let Some((_, lines)) = sections.last_mut() {
                lines.push(line);
            } else if !line.is_empty() {
                return Err(CoreError::Template(format!(
                    "{id}: text before the first section header"
                )));
            }
        }
        // The file's final newline leaves one empty trailing line.
        if let Some((_, lines)) = sections.last_mut() {
            if lines.last() == Some(&"") {
                lines.pop();
            }
        }

        let mut iter = sections.into_iter();
        let system = match iter.next() {
            Some((ChatRole::System, lines)) => lines.join("\n"),
            _ => {
                return Err(CoreError::Template(format!(
                    "{id}: must start with a system section"
                )))
            }
        };
        let rest: Vec<_> = iter.collect();
        if rest.len() % 2 != 0 {
            return Err(CoreError::Template(format!("{id}: unpaired few-shot turn")));
        }
        let mut shots = Vec::with_capacity(rest.len() / 2);
        for pair in rest.chunks_exact(2) {
            match (&pair[0], &pair[1]) {
                ((ChatRole::User, u), (ChatRole::Assistant, a)) => {
                    shots.push((u.join("\n"), a.join("\n")))
                }
                _ => {
                    return Err(CoreError::Template(format!(
                        "{id}: few-shot turns must alternate user/assistant"
                    )))
                }
            }
        }
        Ok(Self { id, system, shots })
    }

    /// Serializes back to the asset format.
    pub fn to_asset_text(&self) -> String {
        let mut out = format!("### system\n{}\n", self.system);
        for (u, a) in &self.shots {
            out.push_str(&format!("### user\n{u}\n### assistant\n{a}\n"));
        }
        out
    }

    /// System message followed by the few-shot turns.
    pub fn preamble(&self) -> Vec<ChatMessage> {
        let mut msgs = Vec::with_capacity(1 + 2 * self.shots.len());
        msgs.push(ChatMessage::new(ChatRole::System, self.system.clone()));
        for (u, a) in &self.shots {
            msgs.push(ChatMessage::new(ChatRole::User, u.clone()));
            msgs.push(ChatMessage::new(ChatRole::Assistant, a.clone()));
        }
        msgs
    }
}

/// The set of prompt templates, one per [`TemplateId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateLibrary {
    templates: BTreeMap<TemplateId, Template>,
}

const BUILTIN: [(TemplateId, &str); 6] = [
    (TemplateId::Extract, include_str!("../../templates/extract.txt")),
    (TemplateId::Recommend, include_str!("../../templates/recommend.txt")),
    (TemplateId::Recombine, include_str!("../../templates/recombine.txt")),
    (TemplateId::MatchLayout, include_str!("../../templates/match_layout.txt")),
    (TemplateId::GenLayout, include_str!("../../templates/gen_layout.txt")),
    (TemplateId::Paraphrase, include_str!("../../templates/paraphrase.txt")),
];

impl TemplateLibrary {
    /// Templates bundled with the crate.
    pub fn builtin() -> Self {
        let templates = BUILTIN
            .iter()
            .map(|(id, text)| {
                let t = Template::parse(*id, text).expect("bundled template is well formed");
                (*id, t)
            })
            .collect();
        Self { templates }
    }

    /// Raw text of a bundled template asset.
    pub fn builtin_asset(id: TemplateId) -> &'static str {
        BUILTIN
            .iter()
            .find(|(t, _)| *t == id)
            .map(|(_, text)| *text)
            .expect("every template id has a bundled asset")
    }

    /// Loads `<id>.txt` for every template id from a directory. Missing files
    /// fall back to the bundled asset.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut lib = Self::builtin();
        for id in TemplateId::ALL {
            let path = dir.join(format!("{}.txt", id.as_str()));
            if !path.exists() {
                continue;
            }
            let text = fs::read_to_string(&path)
                .map_err(|e| CoreError::Template(format!("{}: {e}", path.display())))?;
            lib.templates.insert(id, Template::parse(id, &text)?);
        }
        Ok(lib)
    }

    pub fn get(&self, id: TemplateId) -> &Template {
        self.templates
            .get(&id)
            .expect("library holds every template id")
    }

    /// All few-shot assistant texts of a template.
    pub fn assistant_examples(&self, id: TemplateId) -> Vec<&str> {
        self.get(id).shots.iter().map(|(_, a)| a.as_str()).collect()
    }
}

impl Default for TemplateLibrary {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_templates_round_trip_byte_for_byte() {
        let lib = TemplateLibrary::builtin();
        for id in TemplateId::ALL {
            assert_eq!(
                lib.get(id).to_asset_text(),
                TemplateLibrary::builtin_asset(id),
                "{id}"
            );
        }
    }

    #[test]
    fn few_shot_counts() {
        let lib = TemplateLibrary::builtin();
        let counts: Vec<usize> = TemplateId::ALL.iter().map(|id| lib.get(*id).shots.len()).collect();
        assert_eq!(counts, [4, 6, 3, 6, 7, 0]);
    }

    #[test]
    fn rejects_malformed_assets() {
        assert!(Template::parse(TemplateId::Extract, "### user\nhi\n").is_err());
        assert!(Template::parse(TemplateId::Extract, "### system\ns\n### user\nu\n").is_err());
        assert!(Template::parse(TemplateId::Extract, "### system\ns\n### bogus\nu\n").is_err());
        assert!(Template::parse(TemplateId::Extract, "oops\n### system\ns\n").is_err());
    }

    #[test]
    fn load_dir_overrides_single_templates() {
        let dir = std::env::temp_dir().join(format!("recomb-tpl-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("paraphrase.txt"), "### system\nBe brief.\n").unwrap();
        let lib = TemplateLibrary::load_dir(&dir).unwrap();
        assert_eq!(lib.get(TemplateId::Paraphrase).system, "Be brief.");
        assert_eq!(lib.get(TemplateId::Extract), TemplateLibrary::builtin().get(TemplateId::Extract));
        fs::remove_dir_all(&dir).unwrap();
    }
}
