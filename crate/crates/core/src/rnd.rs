//! Deterministic random draws on top of ChaCha8.
//!
//! All sampling in this crate goes through these helpers rather than a
//! distribution library so that the exact draw algorithm is documented and
//! reproducible from the spec of ChaCha alone: uniform doubles take the
//! top 53 bits of one `next_u64`, and normal deviates use the Box-Muller
//! transform (two uniforms per deviate, cosine branch only).

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A ChaCha8 stream dedicated to one unit of work. Substreams produced
/// from the same seed with different indices are statistically independent
/// and may be consumed in any order.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw in [0, 1) with 53-bit resolution.
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [lo, hi).
pub fn range(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Standard normal deviate via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = unit(rng).max(f64::MIN_POSITIVE);
    let u2 = unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
