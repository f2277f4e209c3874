use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use crate::error::{Error, Result};

/// Per-image seed: first word of the ChaCha8 stream `index` keyed by `seed`.
///
/// Counter-based, so the value for one index never depends on how many
/// other images were drawn before it or on which thread drew them.
pub fn image_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Maps a 64-bit word to `[0, 1)` using its top 53 bits.
pub fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[min, max]` keyed by `(seed, index)`.
pub fn draw_lambda(seed: u64, index: u64, min: f64, max: f64) -> Result<f64> {
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(Error::InvalidRecipe(format!("lambda range [{min}, {max}]")));
    }
    Ok(lambda_from_seed(image_seed(seed, index), min, max))
}

/// The λ that [`draw_lambda`] produces for a given per-image seed.
pub fn lambda_from_seed(image_seed: u64, min: f64, max: f64) -> f64 {
    min + (max - min) * unit_interval(image_seed)
}
