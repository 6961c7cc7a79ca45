//! Polar code construction, successive cancellation decoding and the
//! critical-set driven progressive bit-flipping decoder.
//!
//! All LLR-domain code is generic over a floating point scalar (see [`Real`]);
//! the `*F64` / `*F32` aliases below pin the common instantiations.
//! Code construction itself is carried out in `f64`.
//!
//! Indices that appear in public contracts (information sets, flip
//! positions, critical-set members, first-error positions) are 1-based so
//! that `u_1 .. u_N` maps onto `1 ..= N`. Bit and LLR vectors are plain
//! slices where element `k` holds `u_{k+1}`.

pub mod baselines;
pub mod channel;
pub mod codec;
pub mod critical;
pub mod crc;
mod error;
pub mod gauss;
pub mod progressive;
pub mod sc;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

pub use baselines::{ca_scl_decode, genie_sc_decode, DecodeOutcome, ListDecoder};
pub use channel::{channel_llrs, modulate, transmit, ChannelParams};
pub use codec::{bit_reversal_perm, construct_code, encode, polar_transform, CodeConfig};
pub use crc::{crc_attach, crc_check, CrcSpec};
pub use critical::{
    color_tree, critical_set, modified_critical_set, partition, CriticalSet, LayeredCriticalSets,
    NodeColor, Subblock, SubblockPartition, TreeColoring,
};
pub use error::{Error, Result};
pub use gauss::{
    first_bit_mean, phi, phi_inv, q_func, split_channel_means, subblock_probs, GaProfile,
};
pub use progressive::{
    e_no_child, e_not_select, flip_order, genie_first_error, progressive_decode, FlipNode,
    ProgressiveDecoder, ProgressiveResult, PruneParams,
};
pub use sc::{sc_decode, sc_decode_flip, visit_count, CheckRule, FlipSet, ScDecoder, ScTrace};

/// Scalar type used for LLRs and Gaussian-approximation means.
pub trait Real: Float + FloatConst + Debug + Display + Default + Sum + Send + Sync + 'static {
    /// Lossy conversion from `f64`; every `Real` can represent an `f64` approximately.
    fn of(x: f64) -> Self {
        Self::from(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl<T> Real for T where T: Float + FloatConst + Debug + Display + Default + Sum + Send + Sync + 'static {}

pub type GaProfileF64 = GaProfile<f64>;
pub type GaProfileF32 = GaProfile<f32>;
pub type ScTraceF64 = ScTrace<f64>;
pub type ScTraceF32 = ScTrace<f32>;
pub type ScDecoderF64 = ScDecoder<f64>;
pub type ScDecoderF32 = ScDecoder<f32>;
pub type ListDecoderF64 = ListDecoder<f64>;
pub type ListDecoderF32 = ListDecoder<f32>;
pub type PruneParamsF64 = PruneParams<f64>;
pub type PruneParamsF32 = PruneParams<f32>;
pub type ChannelParamsF64 = ChannelParams<f64>;
pub type ChannelParamsF32 = ChannelParams<f32>;
pub type ProgressiveDecoderF64<'a> = ProgressiveDecoder<'a, f64>;
pub type ProgressiveDecoderF32<'a> = ProgressiveDecoder<'a, f32>;
