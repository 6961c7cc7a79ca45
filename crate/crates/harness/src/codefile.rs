//! JSON code definition files.
//!
//! ```json
//! {"n": 10, "K": 512, "design_snr_db": 2.0, "info_set": [..],
//!  "crc": {"degree": 24, "taps": [0, 1, 5, 6, 23, 24]}, "mu_profile": [..]}
//! ```
//! `n` is log2 of the block length, `info_set` is 1-based and `K` counts the
//! CRC bits. `crc` may be `null`.

use std::path::Path;

use polarflip::{construct_code, CodeConfig, CrcSpec};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub design_snr_db: f64,
    pub info_set: Vec<usize>,
    pub crc: Option<CrcSpec>,
    pub mu_profile: Vec<f64>,
}

impl CodeFile {
    pub fn from_config(config: &CodeConfig) -> Self {
        Self {
            n: config.log_len(),
            k: config.k(),
            design_snr_db: config.design_snr_db(),
            info_set: config.info_set().to_vec(),
            crc: config.crc().cloned(),
            mu_profile: config.mu_profile().to_vec(),
        }
    }

    pub fn to_config(&self) -> Result<CodeConfig> {
        if self.info_set.len() != self.k {
            return Err(HarnessError::Config(format!(
                "code file lists {} information bits but K = {}",
                self.info_set.len(),
                self.k
            )));
        }
        let config = CodeConfig::new(self.n, self.info_set.clone(), self.design_snr_db, self.mu_profile.clone())?;
        Ok(match &self.crc {
            Some(crc) => config.with_crc(CrcSpec::new(crc.degree, crc.taps.clone())?)?,
            None => config,
        })
    }

    /// GA construction with an optional CRC.
    pub fn construct(n: u32, k: usize, design_snr_db: f64, crc: Option<CrcSpec>) -> Result<Self> {
        let config = construct_code(n, k, design_snr_db)?;
        let config = match crc {
            Some(crc) => config.with_crc(crc)?,
            None => config,
        };
        Ok(Self::from_config(&config))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let file: Self = serde_json::from_str(&text)?;
        file.to_config()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
    }
}
