//! Pruning parameter files:
//! `{"gamma_left": 3.6, "gamma_right": 2.0, "omega": [null, null, 0.5, 0.25, null],
//!   "max_level": 4, "node_budget": null}`.
//! `gamma_right: null` and `null` omega entries switch the rule off.

use std::path::Path;

use polarflip::{PruneParams, Real};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub gamma_left: f64,
    #[serde(default)]
    pub gamma_right: Option<f64>,
    #[serde(default)]
    pub omega: Vec<Option<f64>>,
    #[serde(default)]
    pub max_level: Option<usize>,
    #[serde(default)]
    pub node_budget: Option<usize>,
}

impl ParamsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let file: Self = serde_json::from_str(&text)?;
        file.prune::<f64>().validate()?;
        Ok(file)
    }

    pub fn prune<T: Real>(&self) -> PruneParams<T> {
        PruneParams {
            gamma_left: T::of(self.gamma_left),
            gamma_right: self.gamma_right.map(T::of),
            omega: self.omega.iter().map(|w| w.map(T::of)).collect(),
        }
    }
}

/// Where flip decoders get their pruning thresholds.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ParamsSource {
    /// No pruning.
    #[default]
    Disabled,
    /// Tuned level-4 table, nearest row to each operating point.
    Tuned,
    File(ParamsFile),
}

impl ParamsSource {
    /// `none`, `tuned`, or a path to a params file.
    pub fn parse(arg: &str) -> Result<Self> {
        match arg {
            "none" | "disabled" => Ok(Self::Disabled),
            "tuned" => Ok(Self::Tuned),
            path => ParamsFile::load(Path::new(path)).map(Self::File),
        }
    }

    pub fn prune<T: Real>(&self, ebn0_db: f64) -> PruneParams<T> {
        match self {
            Self::Disabled => PruneParams::disabled(),
            Self::Tuned => PruneParams::tuned(ebn0_db),
            Self::File(f) => f.prune(),
        }
    }

    pub fn node_budget(&self) -> Option<usize> {
        match self {
            Self::File(f) => f.node_budget,
            _ => None,
        }
    }

    pub fn max_level(&self) -> Option<usize> {
        match self {
            Self::File(f) => f.max_level,
            _ => None,
        }
    }
}
