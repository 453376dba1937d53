//! Seeded random streams.
//!
//! Every estimator run draws from its own ChaCha stream identified by
//! `(seed, label)`. Labels for nested runs are derived with [`child_label`],
//! so concurrent runs never share generator state.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type EstimatorRng = ChaCha12Rng;

/// Independent generator for `(seed, label)`.
pub fn stream(seed: u64, label: u64) -> EstimatorRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(label);
    rng
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Label of the `index`-th child of `parent`.
pub fn child_label(parent: u64, index: u64) -> u64 {
    mix(mix(parent) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Fixed labels for top-level tasks.
pub mod labels {
    pub const RUN: u64 = 0x01;
    pub const FRINGE_REAL: u64 = 0x02;
    pub const FRINGE_IMAG: u64 = 0x03;
    pub const TOMOGRAPHY: u64 = 0x10;
    pub const OBSERVABLE: u64 = 0x20;
    pub const PURITY: u64 = 0x30;
    pub const EXTREMAL: u64 = 0x40;
    pub const CHANNEL: u64 = 0x50;
}
