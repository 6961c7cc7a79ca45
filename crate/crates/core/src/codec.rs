//! Code construction and encoding, `c = u B_N G_2^{⊗n}`.

use crate::crc::CrcSpec;
use crate::gauss::{channel_mu_from_ebn0, split_channel_means};
use crate::{Error, Result};

/// A constructed polar code. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeConfig {
    log_len: u32,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    design_snr_db: f64,
    mu_profile: Vec<f64>,
    crc: Option<CrcSpec>,
}

impl CodeConfig {
    /// Builds a code from an explicit 1-based information set.
    pub fn new(
        log_len: u32,
        mut info_set: Vec<usize>,
        design_snr_db: f64,
        mu_profile: Vec<f64>,
    ) -> Result<Self> {
        if log_len == 0 || log_len > 24 {
            return Err(Error::Config(format!("log2 block length {log_len} outside 1..=24")));
        }
        let len = 1usize << log_len;
        info_set.sort_unstable();
        let before = info_set.len();
        info_set.dedup();
        if info_set.len() != before {
            return Err(Error::Config("information set has duplicates".into()));
        }
        if info_set.is_empty() {
            return Err(Error::Config("information set is empty".into()));
        }
        if info_set[0] == 0 || *info_set.last().unwrap() > len {
            return Err(Error::Config(format!("information set must lie in 1..={len}")));
        }
        if mu_profile.len() != len {
            return Err(Error::Config(format!(
                "mean profile has {} entries, expected {len}",
                mu_profile.len()
            )));
        }
        if mu_profile.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::Config("mean profile must be nonnegative".into()));
        }
        let mut frozen = vec![true; len];
        for &i in &info_set {
            frozen[i - 1] = false;
        }
        Ok(Self { log_len, info_set, frozen, design_snr_db, mu_profile, crc: None })
    }

    /// Attaches a CRC occupying the last `degree` unfrozen positions.
    pub fn with_crc(mut self, crc: CrcSpec) -> Result<Self> {
        if crc.width() >= self.k() {
            return Err(Error::Config(format!(
                "K = {} leaves no payload for a degree-{} CRC",
                self.k(),
                crc.degree
            )));
        }
        self.crc = Some(crc);
        Ok(self)
    }

    pub fn log_len(&self) -> u32 {
        self.log_len
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    /// Unfrozen bit count, CRC included.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    /// 1-based.
    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i - 1]
    }

    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }

    pub fn mu_profile(&self) -> &[f64] {
        &self.mu_profile
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    /// Payload bits carried per block (K minus CRC parity).
    pub fn payload_len(&self) -> usize {
        self.k() - self.crc.as_ref().map_or(0, CrcSpec::width)
    }

    /// Unfrozen bits of `u` in information-set order.
    pub fn info_bits(&self, u: &[u8]) -> Vec<u8> {
        self.info_set.iter().map(|&i| u[i - 1]).collect()
    }

    /// Spreads `bits` (length K) over the information set.
    pub fn place(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.k() {
            return Err(Error::Input(format!(
                "expected {} information bits, got {}",
                self.k(),
                bits.len()
            )));
        }
        let mut u = vec![0u8; self.len()];
        for (&i, &b) in self.info_set.iter().zip(bits) {
            u[i - 1] = b;
        }
        Ok(u)
    }

    /// Builds the full `u` vector for a payload: CRC is appended when present.
    pub fn message(&self, payload: &[u8]) -> Result<Vec<u8>> {
        match &self.crc {
            Some(crc) => self.place(&crc.attach(payload)),
            None => self.place(payload),
        }
    }

    /// Whether the unfrozen part of `u_hat` passes the CRC; vacuously true
    /// when the code carries no CRC.
    pub fn crc_passes(&self, u_hat: &[u8]) -> bool {
        match &self.crc {
            Some(crc) => crc.check(&self.info_bits(u_hat)).unwrap_or(false),
            None => true,
        }
    }
}

/// GA construction: the `k` split channels of largest mean carry information,
/// ties going to the lower index.
pub fn construct_code(log_len: u32, k: usize, design_snr_db: f64) -> Result<CodeConfig> {
    if log_len == 0 || log_len > 24 {
        return Err(Error::Config(format!("log2 block length {log_len} outside 1..=24")));
    }
    let len = 1usize << log_len;
    if k == 0 || k > len {
        return Err(Error::Config(format!("K = {k} outside 1..={len}")));
    }
    if !design_snr_db.is_finite() {
        return Err(Error::Config("design SNR must be finite".into()));
    }
    let rate = k as f64 / len as f64;
    let profile = split_channel_means(log_len, channel_mu_from_ebn0(design_snr_db, rate))?;
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| {
        profile.means[b]
            .total_cmp(&profile.means[a])
            .then(a.cmp(&b))
    });
    let info_set = order[..k].iter().map(|&i| i + 1).collect();
    CodeConfig::new(log_len, info_set, design_snr_db, profile.means)
}

fn reverse_bits(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Bit-reversal permutation of `1..=2^n`, 1-based.
pub fn bit_reversal_perm(log_len: u32) -> Vec<usize> {
    (0..1usize << log_len)
        .map(|i| reverse_bits(i, log_len) + 1)
        .collect()
}

/// `x = u G_2^{⊗n}` in place, no bit reversal.
pub(crate) fn transform_in_place(x: &mut [u8]) {
    let len = x.len();
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for j in block..block + half {
                x[j] ^= x[j + half];
            }
        }
        half *= 2;
    }
}

/// `u B_N G_2^{⊗n}` for any `u` of power-of-two length, ignoring frozen bits.
pub fn polar_transform(u: &[u8]) -> Vec<u8> {
    assert!(u.len().is_power_of_two(), "length must be a power of two");
    let bits = u.len().trailing_zeros();
    let mut x: Vec<u8> = (0..u.len()).map(|i| u[reverse_bits(i, bits)]).collect();
    transform_in_place(&mut x);
    x
}

pub fn encode(config: &CodeConfig, u: &[u8]) -> Result<Vec<u8>> {
    if u.len() != config.len() {
        return Err(Error::Input(format!(
            "message has {} bits, block length is {}",
            u.len(),
            config.len()
        )));
    }
    if let Some(b) = u.iter().find(|&&b| b > 1) {
        return Err(Error::Input(format!("non-binary value {b} in message")));
    }
    if let Some(i) = (1..=u.len()).find(|&i| config.is_frozen(i) && u[i - 1] != 0) {
        return Err(Error::FrozenViolation(i));
    }
    Ok(polar_transform(u))
}
