use std::path::Path;

use anyhow::{Context, Result};
use puiseux::claims::{Grid, SuiteConfig};

/// Loads `SuiteConfig` from a TOML file of `key = value` lines; missing keys
/// keep their defaults, unknown keys are rejected.
pub fn load(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Flag values win over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<Grid>,
}

pub fn resolve(path: Option<&Path>, o: &Overrides) -> Result<SuiteConfig> {
    let mut cfg = match path {
        Some(p) => load(p)?,
        None => SuiteConfig::default(),
    };
    if let Some(d) = o.depth {
        cfg.depth = d;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(g) = o.grid {
        cfg.grid = g;
    }
    Ok(cfg)
}
