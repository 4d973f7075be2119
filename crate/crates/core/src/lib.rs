//! Correspondence-free hand-eye calibration toolkit.
//!
//! Estimates the rigid transform `X` in `AX = XB` from two pose sets that
//! carry no pairing information, by adversarially aligning the distribution
//! of `X^-1 A X` with the distribution of `B`. The generator of the
//! adversarial game is the conjugation map itself and its only trainable
//! parameter is `X`, so the usual failure mode of mode collapse cannot
//! occur. Also ships classical comparison solvers and a generalization to
//! scalar parameter-estimation problems that satisfy a decoupling condition.
//!
//! Module map:
//! - [`se3`]: SO(3)/SE(3) types, exp/log maps, sampling, error metrics.
//! - [`tinynet`]: minimal MLP engine with manual backprop (the discriminator).
//! - [`datagen`]: synthetic dataset generation, noise, streams, pose files.
//! - [`gan`]: the adversarial calibration solver.
//! - [`baselines`]: correspondence least-squares and moment-matching solvers.
//! - [`genfit`]: decoupled-model parameter estimation (polynomial example).

pub mod baselines;
pub mod datagen;
pub mod error;
pub mod gan;
pub mod genfit;
pub mod se3;
pub mod tinynet;

pub use error::{Error, Result};
pub use se3::{Pose, Rotation, Twist};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic per-task random source: one master seed, one stream index
/// per independent task (restart, trial, worker). Streams never collide, so
/// parallel schedules cannot change results.
pub fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
