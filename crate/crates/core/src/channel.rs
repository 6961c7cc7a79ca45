//! BPSK over AWGN.
//!
//! Noise comes from ChaCha8 seeded with a 64-bit value; Monte Carlo trials
//! use `seed_base + trial_index` so every trial is an independent,
//! reproducible stream regardless of scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    pub sigma: T,
    pub ebn0_db: f64,
    pub rate: f64,
}

impl<T: Real> ChannelParams<T> {
    /// `sigma^2 = 1 / (2 R 10^(ebn0/10))`.
    pub fn from_ebn0(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !ebn0_db.is_finite() || !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Config(format!(
                "invalid channel point: Eb/N0 {ebn0_db} dB at rate {rate}"
            )));
        }
        let var = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
        Ok(Self { sigma: T::of(var.sqrt()), ebn0_db, rate })
    }

    /// Direct noise level; `ebn0_db` is back-computed for bookkeeping.
    pub fn from_sigma(sigma: T, rate: f64) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::Config(format!("noise deviation must be positive, got {sigma}")));
        }
        let s = sigma.as_f64();
        let ebn0_db = 10.0 * (1.0 / (2.0 * rate * s * s)).log10();
        Ok(Self { sigma, ebn0_db, rate })
    }

    pub fn variance(&self) -> T {
        self.sigma * self.sigma
    }

    /// Mean of the channel LLR under the all-zero codeword, `2 / sigma^2`.
    pub fn llr_mean(&self) -> T {
        T::of(2.0) / self.variance()
    }
}

/// `x_i = 1 - 2 c_i`.
pub fn modulate<T: Real>(c: &[u8]) -> Vec<T> {
    c.iter()
        .map(|&b| if b == 0 { T::one() } else { -T::one() })
        .collect()
}

/// Adds i.i.d. `N(0, sigma^2)` noise drawn from `rng`.
pub fn transmit_with<T: Real, R: Rng + ?Sized>(x: &[T], params: &ChannelParams<T>, rng: &mut R) -> Vec<T> {
    x.iter()
        .map(|&xi| {
            let z: f64 = rng.sample(StandardNormal);
            xi + params.sigma * T::of(z)
        })
        .collect()
}

/// Adds AWGN from a fresh generator seeded with `seed`.
pub fn transmit<T: Real>(x: &[T], params: &ChannelParams<T>, seed: u64) -> Vec<T> {
    let mut rng = trial_rng(seed);
    transmit_with(x, params, &mut rng)
}

/// `L(y_i) = 2 y_i / sigma^2`.
pub fn channel_llrs<T: Real>(y: &[T], params: &ChannelParams<T>) -> Vec<T> {
    let scale = params.llr_mean();
    y.iter().map(|&v| v * scale).collect()
}

pub fn trial_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
