//! Seed derivation and sampling helpers shared by the seeded components.
//!
//! Every randomized fit owns a `ChaCha8Rng` seeded from the user seed plus a
//! stream index, so independent sub-fits (forest trees, per-fold base
//! learners, CV folds) never share a stream and results stay reproducible
//! bit for bit across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Derives a child seed from `(seed, stream)` with a splitmix64 finalizer.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard-normal draw (Box-Muller, cosine branch).
///
/// Sampling always happens in f64 so that f32 and f64 pipelines consume the
/// identical random stream.
pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1], keeps ln finite
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
