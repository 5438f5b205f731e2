//! JSON configuration schema for schedules, profiles and seed configurations.

use serde::{Deserialize, Serialize};

use super::{InitialProfile, Poly, Schedule, Segment};
use crate::error::{Error, Result};

/// A constant or a coefficient list `[a0, a1, ...]` in absolute time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Constant(f64),
    Coefficients(Vec<f64>),
}

impl PolySpec {
    fn to_poly(&self) -> Poly {
        match self {
            PolySpec::Constant(v) => Poly::constant(*v),
            PolySpec::Coefficients(c) => Poly(c.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub t_start: f64,
    pub p: PolySpec,
    pub beta: PolySpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default)]
    pub c: Vec<f64>,
    #[serde(default)]
    pub c_weighted: Option<f64>,
}

impl ProfileSpec {
    pub fn build(&self) -> Result<InitialProfile> {
        InitialProfile::new(self.c.clone(), self.c_weighted)
    }
}

pub fn build_schedule(specs: &[SegmentSpec]) -> Result<Schedule> {
    Schedule::new(
        specs
            .iter()
            .map(|s| Segment { t_start: s.t_start, p: s.p.to_poly(), beta: s.beta.to_poly() })
            .collect(),
    )
}

/// Model part of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schedule: Vec<SegmentSpec>,
    #[serde(default)]
    pub profile: ProfileSpec,
    /// Urn multiplicities by exact size, replacing the discretized profile.
    #[serde(default)]
    pub seed_config: Option<Vec<u64>>,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn schedule(&self) -> Result<Schedule> {
        build_schedule(&self.schedule)
    }

    pub fn profile(&self) -> Result<InitialProfile> {
        self.profile.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_figure_one_config() {
        let cfg = ModelConfig::from_json(
            r#"{"schedule":[{"t_start":0.0,"p":0.0,"beta":8.0},{"t_start":0.01,"p":0,"beta":[1.0]}],
                "profile":{"c":[]},"seed_config":[2]}"#,
        )
        .unwrap();
        assert_eq!(cfg.schedule().unwrap(), Schedule::figure_one());
        assert!(cfg.profile().unwrap().is_small());
        assert_eq!(cfg.seed_config, Some(vec![2]));
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = ModelConfig::from_json(r#"{"schedule":[{"t_start":0,"p":0,"beta":1,"gamma":2}]}"#);
        assert!(e.is_err());
        let e = ModelConfig::from_json(r#"{"schedule":[],"extra":1}"#);
        assert!(e.is_err());
    }
}
