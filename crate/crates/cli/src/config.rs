//! TOML run configuration. Every section is optional; flags override it.

use std::path::Path;

use anyhow::Context;
use hftml_core::featureset::FeatureConfig;
use hftml_core::modelsel::{CvSettings, DEFAULT_GRID};
use hftml_core::panelmetrics::events::{ESTIMATION_WINDOW, MIN_ESTIMATION_OBS};
use hftml_core::tickdata::SynthConfig;
use hftml_core::EnsembleParams;
use serde::{Deserialize, Serialize};

use crate::Usage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Overrides the seed of every stochastic section when set.
    pub seed: Option<u64>,
    pub log_level: String,
    /// Read from config files but not echoed: outputs do not depend on it.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    pub synth: SynthConfig,
    pub features: FeatureConfig,
    pub forest: EnsembleParams,
    pub cv: CvSettings,
    pub grid: GridConfig,
    pub pdp: PdpConfig,
    pub latarb: LatarbConfig,
    pub events: EventsConfig,
    pub robust: RobustConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            log_level: "info".into(),
            threads: None,
            synth: SynthConfig::default(),
            features: FeatureConfig::default(),
            forest: EnsembleParams::default(),
            cv: CvSettings::default(),
            grid: GridConfig::default(),
            pdp: PdpConfig::default(),
            latarb: LatarbConfig::default(),
            events: EventsConfig::default(),
            robust: RobustConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub min_split: Vec<usize>,
    pub n_trees: Vec<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { min_split: DEFAULT_GRID.to_vec(), n_trees: DEFAULT_GRID.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdpConfig {
    pub n_grid: usize,
    /// Rows averaged per grid point; 0 uses every row.
    pub sample: usize,
    pub seed: u64,
}

impl Default for PdpConfig {
    fn default() -> Self {
        PdpConfig { n_grid: 20, sample: 0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatarbConfig {
    pub tick_cents: i64,
}

impl Default for LatarbConfig {
    fn default() -> Self {
        LatarbConfig { tick_cents: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventsConfig {
    pub pre: i64,
    pub post: i64,
    pub estimation_window: (i64, i64),
    pub min_estimation_obs: usize,
}

impl Default for EventsConfig {
    fn default() -> Self {
        EventsConfig { pre: 10, post: 10, estimation_window: ESTIMATION_WINDOW, min_estimation_obs: MIN_ESTIMATION_OBS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustConfig {
    pub winsorize: f64,
}

impl Default for RobustConfig {
    fn default() -> Self {
        RobustConfig { winsorize: 0.01 }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<RunConfig> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| Usage(format!("invalid config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn apply_seed(&mut self, seed: Option<u64>) {
        if let Some(s) = seed.or(self.seed) {
            self.seed = Some(s);
            self.synth.seed = s;
            self.forest.seed = s;
            self.cv.seed = s;
            self.pdp.seed = s;
        }
    }

    /// Writes the effective configuration next to a command's outputs.
    pub fn echo(&self, dir: &Path) -> anyhow::Result<()> {
        let text = toml::to_string(self).context("serializing effective config")?;
        std::fs::write(dir.join("hftml.toml"), text).with_context(|| format!("writing config into {}", dir.display()))
    }
}
