//! Random matrices with a prescribed eigenvalue or singular-value band.

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{sample_orthogonal, scale_columns, symmetrize};
use crate::scalar::Real;

fn check_band(lower: f64, upper: f64) -> Result<()> {
    if lower.is_nan() || lower <= 0.0 || upper.is_nan() || upper < lower || upper.is_infinite() {
        return Err(Error::InvalidBand { lower, upper });
    }
    Ok(())
}

/// `count` values in `[lower, upper]` with both extremes pinned when
/// `count >= 2`; the interior is uniform. A single value is drawn uniformly.
fn band_values<R: Rng + ?Sized>(count: usize, lower: f64, upper: f64, rng: &mut R) -> Vec<f64> {
    let draw = |rng: &mut R| {
        if upper > lower {
            rng.random_range(lower..=upper)
        } else {
            lower
        }
    };
    match count {
        0 => Vec::new(),
        1 => vec![draw(rng)],
        _ => {
            let mut values = Vec::with_capacity(count);
            values.push(lower);
            for _ in 0..count - 2 {
                values.push(draw(rng));
            }
            values.push(upper);
            values
        }
    }
}

/// Symmetric `dim × dim` matrix `Q diag(λ) Qᵀ` with `λ ⊂ [mu, upper]`.
///
/// When `mu == upper` the result is exactly `mu · I` and consumes no
/// randomness.
pub fn sample_spd_with_band<T: Real, R: Rng + ?Sized>(
    dim: usize,
    mu: f64,
    upper: f64,
    rng: &mut R,
) -> Result<Array2<T>> {
    check_band(mu, upper)?;
    if mu == upper {
        return Ok(Array2::eye(dim).mapv(|e: T| e * T::of(mu)));
    }
    let eigenvalues: Vec<T> = band_values(dim, mu, upper, rng).into_iter().map(T::of).collect();
    let q = sample_orthogonal::<T, _>(dim, rng);
    let scaled = scale_columns(q.clone(), &eigenvalues);
    Ok(symmetrize(scaled.dot(&q.t())))
}

/// `d_x × d_y` matrix with singular values in `[mu, upper]`, extremes pinned
/// when `min(d_x, d_y) >= 2`.
///
/// Square matrices are drawn as `Q diag(σ) Qᵀ` (see
/// [`sample_spd_with_band`]); rectangular ones as `U diag(σ) Vᵀ` with
/// independent orthogonal `U`, `V`.
pub fn sample_singular_band<T: Real, R: Rng + ?Sized>(
    d_x: usize,
    d_y: usize,
    mu: f64,
    upper: f64,
    rng: &mut R,
) -> Result<Array2<T>> {
    check_band(mu, upper)?;
    if d_x == d_y {
        // Symmetric positive definite: eigenvalues equal singular values, and
        // any average of such samples stays inside the band, so the averaged
        // game keeps a well-conditioned coupling.
        return sample_spd_with_band(d_x, mu, upper, rng);
    }
    let rank = d_x.min(d_y);
    let sigma: Vec<T> = band_values(rank, mu, upper, rng).into_iter().map(T::of).collect();
    let u = sample_orthogonal::<T, _>(d_x, rng);
    let v = sample_orthogonal::<T, _>(d_y, rng);
    // U[:, :rank] diag(σ) V[:, :rank]ᵀ
    let u_r = u.slice(ndarray::s![.., ..rank]).to_owned();
    let v_r = v.slice(ndarray::s![.., ..rank]);
    Ok(scale_columns(u_r, &sigma).dot(&v_r.t()))
}
