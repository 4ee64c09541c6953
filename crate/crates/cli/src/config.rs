//! Run configuration: a JSON file of defaults that individual flags
//! override. The resolved value is snapshotted into every manifest, so an
//! output document always records the configuration that actually applied.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ginidebias::{AnnealConfig, CorrectionMap, Objective};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub objective: Objective,
    /// Fraction of the input routed to the optimization part when no test
    /// file is given.
    pub optimization_fraction: f64,
    pub stratified: bool,
    pub strict: bool,
    pub map: MapChoice,
    /// Annealing schedule. Its seed is always overwritten with the run
    /// seed, so there is exactly one seed knob per run.
    pub anneal: AnnealConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            objective: Objective::Gini,
            optimization_fraction: 0.5,
            stratified: false,
            strict: false,
            map: MapChoice::Preset(MapPreset::Standard),
            anneal: AnnealConfig::default(),
        }
    }
}

/// Either a named preset or an inline function list (validated on parse:
/// non-empty, identity first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapChoice {
    Preset(MapPreset),
    Custom(CorrectionMap),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapPreset {
    Standard,
    ScalesOnly,
    IdentityOnly,
}

impl MapChoice {
    pub fn build(&self) -> CorrectionMap {
        match self {
            Self::Preset(MapPreset::Standard) => CorrectionMap::standard(),
            Self::Preset(MapPreset::ScalesOnly) => CorrectionMap::scales_only(),
            Self::Preset(MapPreset::IdentityOnly) => CorrectionMap::identity_only(),
            Self::Custom(map) => map.clone(),
        }
    }
}

pub struct RunOverrides {
    pub seed: Option<u64>,
    pub objective: Option<Objective>,
    pub optimization_fraction: Option<f64>,
    pub stratified: bool,
    pub strict: bool,
}

/// Load the config file if given, then apply flag overrides. Boolean flags
/// can only switch a setting on; absence means "whatever the file says".
pub fn resolve(
    config_path: Option<&Path>,
    overrides: RunOverrides,
) -> Result<RunConfig, CliError> {
    let mut config = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(objective) = overrides.objective {
        config.objective = objective;
    }
    if let Some(fraction) = overrides.optimization_fraction {
        config.optimization_fraction = fraction;
    }
    if overrides.stratified {
        config.stratified = true;
    }
    if overrides.strict {
        config.strict = true;
    }
    config.anneal.seed = config.seed;
    if !(config.optimization_fraction > 0.0 && config.optimization_fraction < 1.0) {
        return Err(CliError::config(format!(
            "optimization fraction must lie strictly between 0 and 1, got {}",
            config.optimization_fraction
        )));
    }
    config
        .anneal
        .validate()
        .map_err(|e| CliError::config(e.to_string()))?;
    Ok(config)
}
