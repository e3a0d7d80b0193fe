//! Dense helpers: Haar-distributed orthogonal sampling and a pivoted
//! Gaussian-elimination solver.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative pivot threshold used by [`solve_linear`] for `f64`.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

pub(crate) fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Array2<T> {
    Array2::from_shape_simple_fn((rows, cols), || T::of(rng.sample::<f64, _>(StandardNormal)))
}

/// Draws a rotation-invariant random orthogonal matrix.
///
/// QR-factorizes a standard Gaussian matrix with Householder reflections and
/// flips the columns of `Q` so that `R` has a positive diagonal.
pub fn sample_orthogonal<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Array2<T> {
    assert!(dim >= 1, "orthogonal sample needs dim >= 1");
    let mut r = gaussian_matrix::<T, _>(dim, dim, rng);
    let two = T::of(2.0);
    let mut reflectors: Vec<Option<Array1<T>>> = Vec::with_capacity(dim);
    let mut diag_sign = vec![T::one(); dim];

    for k in 0..dim {
        let column = r.slice(s![k.., k]).to_owned();
        let norm = column.dot(&column).sqrt();
        if k + 1 == dim || norm == T::zero() {
            diag_sign[k] = if r[[k, k]] < T::zero() { -T::one() } else { T::one() };
            reflectors.push(None);
            continue;
        }
        let x0 = column[0];
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        let mut v = column;
        v[0] -= alpha;
        let vnorm = v.dot(&v).sqrt();
        if vnorm == T::zero() {
            diag_sign[k] = if alpha < T::zero() { -T::one() } else { T::one() };
            reflectors.push(None);
            continue;
        }
        v.mapv_inplace(|e| e / vnorm);
        let mut block = r.slice_mut(s![k.., k..]);
        let proj = v.dot(&block);
        for (i, &vi) in v.iter().enumerate() {
            let mut row = block.row_mut(i);
            row.scaled_add(-two * vi, &proj);
        }
        diag_sign[k] = if alpha < T::zero() { -T::one() } else { T::one() };
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the identity, right to left.
    let mut q = Array2::<T>::eye(dim);
    for (k, reflector) in reflectors.iter().enumerate().rev() {
        if let Some(v) = reflector {
            let mut block = q.slice_mut(s![k.., ..]);
            let proj = v.dot(&block);
            for (i, &vi) in v.iter().enumerate() {
                block.row_mut(i).scaled_add(-two * vi, &proj);
            }
        }
    }
    for (k, sign) in diag_sign.into_iter().enumerate() {
        if sign < T::zero() {
            q.column_mut(k).mapv_inplace(|e| -e);
        }
    }
    q
}

/// Solves `m z = b` by Gaussian elimination with partial pivoting.
///
/// A pivot smaller than `1e-12 * max|m_ij|` (or `n * eps * max|m_ij|` for
/// low-precision scalars) is reported as [`Error::Singular`].
pub fn solve_linear<T: Real>(m: ArrayView2<T>, b: ArrayView1<T>) -> Result<Array1<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_linear: matrix must be square",
            expected: n,
            actual: m.ncols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_linear: right-hand side",
            expected: n,
            actual: b.len(),
        });
    }
    let scale = m.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let rel = T::of(PIVOT_TOLERANCE).max(T::epsilon() * T::of(n.max(1) as f64));
    let tolerance = rel * scale;

    let mut a = m.to_owned();
    let mut z = b.to_owned();
    for col in 0..n {
        let (pivot_row, pivot) =
            (col..n)
                .map(|r| (r, a[[r, col]].abs()))
                .fold(
                    (col, T::neg_infinity()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot.is_nan() || pivot <= tolerance {
            return Err(Error::Singular {
                column: col,
                pivot: pivot.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap([col, j], [pivot_row, j]);
            }
            z.swap(col, pivot_row);
        }
        let p = a[[col, col]];
        let pivot_tail = a.slice(s![col, col + 1..]).to_owned();
        for r in col + 1..n {
            let factor = a[[r, col]] / p;
            if factor == T::zero() {
                continue;
            }
            a[[r, col]] = T::zero();
            a.slice_mut(s![r, col + 1..]).scaled_add(-factor, &pivot_tail);
            let zc = z[col];
            z[r] -= factor * zc;
        }
    }
    for col in (0..n).rev() {
        let tail = a.slice(s![col, col + 1..]).dot(&z.slice(s![col + 1..]));
        z[col] = (z[col] - tail) / a[[col, col]];
    }
    Ok(z)
}

/// `(m + mᵀ) / 2`.
pub(crate) fn symmetrize<T: Real>(m: Array2<T>) -> Array2<T> {
    let half = T::of(0.5);
    let t = m.t().to_owned();
    (m + t).mapv(|e| e * half)
}

pub(crate) fn max_abs<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
}

/// Columnwise scaling `q * diag(d)`.
pub(crate) fn scale_columns<T: Real>(mut q: Array2<T>, d: &[T]) -> Array2<T> {
    for (mut col, &s) in q.axis_iter_mut(Axis(1)).zip(d) {
        col.mapv_inplace(|e| e * s);
    }
    q
}
