//! Annotated datasets as JSON lines, one image per line:
//!
//! ```json
//! {"image_path": "img/001.jpg", "subject_matter": ["dog"], "action_pose": ["running"], "theme_mood": ["joyful"], "description": "A dog runs on the beach."}
//! ```
//!
//! Relative image paths resolve against the manifest's directory.

use std::path::{Path, PathBuf};

use recomb_core::blob::sha256_hex;
use recomb_core::KeywordSet;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, EvalResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub image_path: String,
    #[serde(default)]
    pub subject_matter: Vec<String>,
    #[serde(default)]
    pub action_pose: Vec<String>,
    #[serde(default)]
    pub theme_mood: Vec<String>,
    #[serde(default)]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedImage {
    /// Path as written in the manifest.
    pub name: String,
    pub path: PathBuf,
    pub truth: KeywordSet,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub images: Vec<AnnotatedImage>,
    /// SHA-256 of the manifest text.
    pub sha256: String,
}

impl Manifest {
    pub fn parse(text: &str, base_dir: &Path) -> EvalResult<Self> {
        let mut images = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = i + 1;
            let entry: ManifestEntry = serde_json::from_str(line)
                .map_err(|e| EvalError::Manifest { line: line_no, message: e.to_string() })?;
            let truth = KeywordSet::from_lists(&entry.subject_matter, &entry.action_pose, &entry.theme_mood);
            if truth.is_empty() {
                return Err(EvalError::Manifest {
                    line: line_no,
                    message: "an image needs at least one ground-truth keyword".into(),
                });
            }
            let description = entry
                .description
                .map(|d| d.split_whitespace().collect::<Vec<_>>().join(" "))
                .filter(|d| !d.is_empty());
            images.push(AnnotatedImage {
                path: base_dir.join(&entry.image_path),
                name: entry.image_path,
                truth,
                description,
            });
        }
        if images.is_empty() {
            return Err(EvalError::Manifest { line: 0, message: "manifest has no images".into() });
        }
        Ok(Self { images, sha256: sha256_hex(text.as_bytes()) })
    }

    pub fn load(path: &Path) -> EvalResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}
