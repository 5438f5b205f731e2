//! Run configuration: a JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::Context;
use pa_urn::model::{build_schedule, ProfileSpec, SegmentSpec};
use pa_urn::{InitialProfile, Schedule};
use serde::Deserialize;

use crate::UsageError;

/// Everything a command may read from a config file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub schedule: Option<Vec<SegmentSpec>>,
    pub profile: Option<ProfileSpec>,
    /// Urn multiplicities by exact size, replacing the discretized profile.
    pub seed_config: Option<Vec<u64>>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub preset: Option<String>,
    pub budget: Option<String>,
    pub times: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, command: &str) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        if let Some(c) = &cfg.command {
            if c != command {
                return Err(UsageError(format!(
                    "config is for command `{c}`, not `{command}`"
                ))
                .into());
            }
        }
        Ok(cfg)
    }
}

/// Schedule, profile and optional explicit starting urns.
#[derive(Debug, Clone)]
pub struct Model {
    pub schedule: Schedule,
    pub profile: InitialProfile,
    pub seed_config: Option<Vec<u64>>,
}

pub const MODEL_PRESETS: &str = "homogeneous, figure-one";

/// Named models; both start from two empty urns with a zero profile.
pub fn model_preset(name: &str) -> anyhow::Result<Model> {
    let schedule = match name {
        "homogeneous" => Schedule::homogeneous(0.0, 1.0)?,
        "figure-one" => Schedule::figure_one(),
        other => {
            return Err(UsageError(format!(
                "unknown model preset `{other}` (expected one of {MODEL_PRESETS})"
            ))
            .into())
        }
    };
    Ok(Model { schedule, profile: InitialProfile::zero(), seed_config: Some(vec![2]) })
}

/// Model from the config file, else from `preset`, else homogeneous.
pub fn resolve_model(cfg: &RunConfig, preset: Option<&str>) -> anyhow::Result<Model> {
    let base = model_preset(preset.unwrap_or("homogeneous"))?;
    let schedule = match &cfg.schedule {
        Some(specs) => build_schedule(specs).map_err(|e| UsageError(e.to_string()))?,
        None => base.schedule,
    };
    let (profile, seed_config) = match (&cfg.profile, &cfg.seed_config) {
        (None, None) => (base.profile, base.seed_config),
        (p, s) => (
            p.as_ref()
                .map(|p| p.build())
                .transpose()
                .map_err(|e| UsageError(e.to_string()))?
                .unwrap_or_else(InitialProfile::zero),
            s.clone(),
        ),
    };
    Ok(Model { schedule, profile, seed_config })
}
