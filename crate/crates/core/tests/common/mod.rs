#![allow(dead_code)]

use nalgebra::DMatrix;
use ndarray::Array2;

/// Eigenvalues of a symmetric matrix, ascending, via nalgebra.
pub fn sym_eigenvalues(m: &Array2<f64>) -> Vec<f64> {
    let n = m.nrows();
    let dm = DMatrix::from_fn(n, n, |i, j| m[[i, j]]);
    let mut ev: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Singular values via the eigenvalues of `BᵀB` (or `BBᵀ`, whichever is
/// smaller), ascending.
pub fn singular_values(b: &Array2<f64>) -> Vec<f64> {
    let gram = if b.nrows() >= b.ncols() {
        b.t().dot(b)
    } else {
        b.dot(&b.t())
    };
    sym_eigenvalues(&gram).into_iter().map(|v| v.max(0.0).sqrt()).collect()
}

pub fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn rel_dev(a: &ndarray::Array1<f64>, b: &ndarray::Array1<f64>) -> f64 {
    let diff = a - b;
    let scale = a.dot(a).sqrt().max(b.dot(b).sqrt()).max(f64::MIN_POSITIVE);
    diff.dot(&diff).sqrt() / scale
}
