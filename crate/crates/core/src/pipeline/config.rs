//! TOML pipeline configuration with per-scale presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{GcnConfig, LAMBDA_GRID};
use crate::graphs::{EdgePolicy, GraphConfig, TemporalMethod};
use crate::model::{Aggregation, TrainConfig};
use crate::network::{IdEncoding, SyntheticLayout};
use crate::simulator::SimParams;
use crate::{Error, Result};

pub const ARTIFACT_ROOT_ENV: &str = "ODSAGE_ARTIFACT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// The twelve busiest ODs of the small network.
    TwelveOd,
    /// Every OD of a 12-station stretch.
    Tiny,
    /// Every OD of the full synthetic network.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    #[serde(flatten)]
    pub layout: SyntheticLayout,
    /// Stations kept from the middle of line 0; 0 keeps the whole network.
    pub keep_stations: usize,
    /// Keep only the busiest `top_k` ODs.
    pub top_k: Option<usize>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            layout: SyntheticLayout::default(),
            keep_stations: 12,
            top_k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub id_encoding: IdEncoding,
    pub reliability: bool,
    /// Also write the full feature matrix as CSV next to the binary dump.
    pub write_csv: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            id_encoding: IdEncoding::OnehotOd,
            reliability: true,
            write_csv: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalPredictions {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub test_fraction: f64,
    /// Share of training days held out to pick the ridge penalty.
    pub validation_fraction: f64,
    pub lambda_grid: Vec<f64>,
    pub aggregation: Aggregation,
    pub run_gcn: bool,
    /// Also train and score mGraphSAGE without the reliability columns.
    pub reliability_ablation: bool,
    pub external: Vec<ExternalPredictions>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.25,
            validation_fraction: 0.2,
            lambda_grid: LAMBDA_GRID.to_vec(),
            aggregation: Aggregation::Sampled([10, 10]),
            run_gcn: true,
            reliability_ablation: false,
            external: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub scale: Scale,
    pub seed: u64,
    pub artifact_root: PathBuf,
    pub network: NetworkConfig,
    pub simulator: SimParams,
    pub features: FeatureConfig,
    pub graphs: GraphConfig,
    pub train: TrainConfig,
    pub gcn: GcnConfig,
    pub eval: EvalConfig,
}

impl PipelineConfig {
    pub fn preset(scale: Scale) -> Self {
        let mut cfg = Self {
            scale,
            seed: 42,
            artifact_root: PathBuf::from("artifacts"),
            network: NetworkConfig::default(),
            simulator: SimParams::default(),
            features: FeatureConfig::default(),
            graphs: GraphConfig::default(),
            train: TrainConfig::default(),
            gcn: GcnConfig::default(),
            eval: EvalConfig::default(),
        };
        match scale {
            Scale::TwelveOd => cfg.network.top_k = Some(12),
            Scale::Tiny => {}
            Scale::Full => {
                cfg.network.keep_stations = 0;
                cfg.features.id_encoding = IdEncoding::SignedStation;
                cfg.graphs.temporal_method = TemporalMethod::Fft;
                cfg.graphs.origin = EdgePolicy::Cap(10_000);
                cfg.graphs.destination = EdgePolicy::Cap(10_000);
                cfg.train.epochs = 1;
                cfg.gcn.epochs = 1;
            }
        }
        cfg
    }

    /// Parses TOML on top of the preset named by its `scale` key (default
    /// `tiny`). Keys absent from the file keep their preset values.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message()))?;
        let scale = match user.get("scale") {
            None => Scale::Tiny,
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|_| Error::config("scale", "expected one of twelve_od, tiny, full"))?,
        };
        let mut base = toml::Table::try_from(Self::preset(scale))
            .map_err(|e| Error::config("<preset>", e.to_string()))?;
        merge(&mut base, user);
        let cfg: Self = toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.network.keep_stations == 1
            || self.network.keep_stations > self.network.layout.n_stations
        {
            return Err(Error::config(
                "network.keep_stations",
                "must be 0 (whole network) or between 2 and the station count",
            ));
        }
        if self.network.top_k == Some(0) {
            return Err(Error::config("network.top_k", "must be positive"));
        }
        if self.simulator.n_days < 2 {
            return Err(Error::config(
                "simulator.n_days",
                "need at least two days to split",
            ));
        }
        self.graphs.validate()?;
        self.train.validate()?;
        if self.gcn.hidden == 0 || !(self.gcn.learning_rate > 0.0) || self.gcn.batch_size == 0 {
            return Err(Error::config(
                "gcn",
                "hidden, learning_rate and batch_size must be positive",
            ));
        }
        let e = &self.eval;
        if !(e.test_fraction > 0.0 && e.test_fraction < 1.0) {
            return Err(Error::config("eval.test_fraction", "must lie in (0, 1)"));
        }
        if !(e.validation_fraction >= 0.0 && e.validation_fraction < 1.0) {
            return Err(Error::config(
                "eval.validation_fraction",
                "must lie in [0, 1)",
            ));
        }
        if e.lambda_grid.is_empty() || e.lambda_grid.iter().any(|l| !(*l >= 0.0)) {
            return Err(Error::config(
                "eval.lambda_grid",
                "needs at least one non-negative value",
            ));
        }
        if let Aggregation::Sampled(k) = e.aggregation {
            if k.contains(&0) {
                return Err(Error::config(
                    "eval.aggregation",
                    "sample sizes must be positive",
                ));
            }
        }
        Ok(())
    }

    /// The artifact root, unless overridden by the environment.
    pub fn resolved_root(&self) -> PathBuf {
        std::env::var_os(ARTIFACT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| self.artifact_root.clone())
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            // A single-key table is an enum variant; switching variants replaces it.
            (Some(toml::Value::Table(b)), toml::Value::Table(u))
                if !(b.len() == 1 && u.len() == 1 && b.keys().ne(u.keys())) =>
            {
                merge(b, u)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
