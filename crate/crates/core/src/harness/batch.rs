use rand::Rng;

use crate::error::{Error, Result};

/// Draws `batch_size` distinct indices from `0..n`, uniformly without
/// replacement. A full batch is `0..n` in order and consumes no randomness.
pub fn sample_batch<R: Rng + ?Sized>(n: usize, batch_size: usize, rng: &mut R) -> Result<Vec<usize>> {
    if batch_size == 0 || batch_size > n {
        return Err(Error::InvalidParameter {
            name: "batch_size",
            reason: format!("must lie in [1, {n}], got {batch_size}"),
        });
    }
    if batch_size == n {
        return Ok((0..n).collect());
    }
    Ok(rand::seq::index::sample(rng, n, batch_size).into_vec())
}
