//! Bitwise CRC over GF(2).
//!
//! Convention: register starts at zero, message bits are fed MSB-first
//! (first element of the slice is the highest-degree coefficient), no final
//! XOR, parity appended MSB-first.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Generator polynomial given by its exponent set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    pub degree: u32,
    pub taps: Vec<u32>,
}

impl CrcSpec {
    pub fn new(degree: u32, mut taps: Vec<u32>) -> Result<Self> {
        taps.sort_unstable();
        taps.dedup();
        if degree == 0 || degree > 63 {
            return Err(Error::Config(format!("CRC degree {degree} outside 1..=63")));
        }
        if taps.first() != Some(&0) || taps.last() != Some(&degree) {
            return Err(Error::Config(format!(
                "CRC taps {taps:?} must include 0 and the degree {degree}"
            )));
        }
        Ok(Self { degree, taps })
    }

    /// g(D) = D^24 + D^23 + D^6 + D^5 + D + 1.
    pub fn crc24() -> Self {
        Self::new(24, vec![24, 23, 6, 5, 1, 0]).expect("valid polynomial")
    }

    pub fn width(&self) -> usize {
        self.degree as usize
    }

    /// Generator without its leading term, as a register mask.
    fn low_poly(&self) -> u64 {
        self.taps
            .iter()
            .filter(|&&t| t < self.degree)
            .fold(0u64, |acc, &t| acc | (1u64 << t))
    }

    /// `bits(D) * D^degree mod g(D)` as a register value.
    pub fn remainder(&self, bits: &[u8]) -> u64 {
        let deg = self.degree;
        let mask = if deg == 64 { u64::MAX } else { (1u64 << deg) - 1 };
        let poly = self.low_poly();
        let mut reg = 0u64;
        for &b in bits {
            let top = ((reg >> (deg - 1)) & 1) as u8 ^ (b & 1);
            reg = (reg << 1) & mask;
            if top == 1 {
                reg ^= poly;
            }
        }
        reg
    }

    pub fn attach(&self, payload: &[u8]) -> Vec<u8> {
        let reg = self.remainder(payload);
        let deg = self.degree;
        let mut out = Vec::with_capacity(payload.len() + self.width());
        out.extend_from_slice(payload);
        out.extend((0..deg).rev().map(|k| ((reg >> k) & 1) as u8));
        out
    }

    pub fn check(&self, frame: &[u8]) -> Result<bool> {
        if frame.len() <= self.width() {
            return Err(Error::Input(format!(
                "CRC frame of {} bits is shorter than {}",
                frame.len(),
                self.width() + 1
            )));
        }
        // g(0) = 1, so D^deg is invertible mod g and frame*D^deg ≡ 0 iff frame ≡ 0.
        Ok(self.remainder(frame) == 0)
    }
}

impl Default for CrcSpec {
    fn default() -> Self {
        Self::crc24()
    }
}

/// Appends CRC-24 parity to `payload`.
pub fn crc_attach(payload: &[u8]) -> Vec<u8> {
    CrcSpec::crc24().attach(payload)
}

/// True iff `frame` is a multiple of the CRC-24 generator.
pub fn crc_check(frame: &[u8]) -> Result<bool> {
    CrcSpec::crc24().check(frame)
}
