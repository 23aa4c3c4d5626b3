//! `key = value` settings file.
//!
//! Blank lines and `#` comments are ignored. Values given on the command line
//! win over the file, which wins over built-in defaults.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

pub const KEYS: &[&str] = &[
    "seed",
    "swarm_size",
    "max_iterations",
    "c0",
    "c1",
    "c2",
    "topology",
    "ring_radius",
    "velocity_fraction",
    "stagnation_epsilon",
    "stagnation_window",
    "levels",
    "width",
    "height",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub swarm_size: Option<usize>,
    pub max_iterations: Option<usize>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub topology: Option<String>,
    pub ring_radius: Option<usize>,
    pub velocity_fraction: Option<f64>,
    pub stagnation_epsilon: Option<f64>,
    pub stagnation_window: Option<usize>,
    pub levels: Option<String>,
    pub width: Option<u32>,
    pub height: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Invalid {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, label: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fail = |message: String| ConfigError::Invalid {
                path: label.to_string(),
                message: format!("line {}: {message}", n + 1),
            };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| fail("expected `key = value`".into()))?;
            match key {
                "seed" => cfg.seed = Some(parse(key, value).map_err(fail)?),
                "swarm_size" => cfg.swarm_size = Some(parse(key, value).map_err(fail)?),
                "max_iterations" => cfg.max_iterations = Some(parse(key, value).map_err(fail)?),
                "c0" => cfg.c0 = Some(parse(key, value).map_err(fail)?),
                "c1" => cfg.c1 = Some(parse(key, value).map_err(fail)?),
                "c2" => cfg.c2 = Some(parse(key, value).map_err(fail)?),
                "topology" => cfg.topology = Some(value.to_string()),
                "ring_radius" => cfg.ring_radius = Some(parse(key, value).map_err(fail)?),
                "velocity_fraction" => {
                    cfg.velocity_fraction = Some(parse(key, value).map_err(fail)?)
                }
                "stagnation_epsilon" => {
                    cfg.stagnation_epsilon = Some(parse(key, value).map_err(fail)?)
                }
                "stagnation_window" => {
                    cfg.stagnation_window = Some(parse(key, value).map_err(fail)?)
                }
                "levels" => cfg.levels = Some(value.to_string()),
                "width" => cfg.width = Some(parse(key, value).map_err(fail)?),
                "height" => cfg.height = Some(parse(key, value).map_err(fail)?),
                _ => {
                    return Err(fail(format!(
                        "unknown key `{key}` (known: {})",
                        KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(cfg)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad value {value:?} for `{key}`"))
}
