use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Largest accepted reference image.
pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 10 * 1024 * 1024;

/// Service settings, read from TOML by `recomb serve --config`:
///
/// ```toml
/// bind = "127.0.0.1:8080"
/// data_dir = "./data"
/// providers = "stub"        # "stub", "env" or a bundle TOML path
/// seed = 7                  # optional; fixes layout variation
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub bind: String,
    pub data_dir: PathBuf,
    pub providers: String,
    pub max_upload_bytes: usize,
    pub seed: Option<u64>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            data_dir: PathBuf::from("data"),
            providers: "stub".into(),
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            seed: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        if cfg.max_upload_bytes == 0 {
            return Err("max_upload_bytes must be positive".into());
        }
        Ok(cfg)
    }
}
