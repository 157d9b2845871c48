//! Reproducible random streams.
//!
//! Every stochastic routine draws from a ChaCha20 stream (RFC 8439 block
//! function, 20 rounds). Independent streams are addressed by
//! `(seed, domain, index)`:
//!
//! * key: 32 bytes, `seed` as little-endian u64 in bytes 0..8, `domain` as
//!   little-endian u64 in bytes 8..16, zeros elsewhere;
//! * stream (nonce): `index` as a 64-bit stream id;
//! * the 64-bit block counter starts at zero.
//!
//! Words are consumed in little-endian u32 order; a u64 is `lo | hi << 32`.
//! Uniform reals are `(u64 >> 11) * 2^-53` in `[0, 1)`. Gaussian deviates use
//! the basic Box–Muller transform with `u1` replaced by `1 - u1` so the log is
//! finite, and only the cosine branch is used.
//!
//! A batch worker that handles trial `i` opens `stream(seed, domain, i)`, so
//! results never depend on how work is split across threads.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Domain tag for teleportation trials.
pub const DOMAIN_TELEPORT: u64 = 1;
/// Domain tag for experiment events.
pub const DOMAIN_EXPERIMENT: u64 = 2;
/// Domain tag for correlation scans.
pub const DOMAIN_BELLSCAN: u64 = 3;
/// Domain tag for Bell-state discrimination batches.
pub const DOMAIN_DISCRIMINATE: u64 = 4;

/// The generator used throughout the crate.
pub type Stream = ChaCha20Rng;

/// Opens the stream addressed by `(seed, domain, index)`.
pub fn stream(seed: u64, domain: u64, index: u64) -> Stream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uniform deviate in `[0, 1)` with 53 bits of resolution.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Returns true with probability `p` (clamped to `[0, 1]`).
pub fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    uniform(rng) < p
}

/// Standard normal deviate (Box–Muller, cosine branch).
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
