//! Thin wrappers around the dense eigen/SVD kernels plus an elimination-based
//! rank routine that shares no code with them.

use nalgebra::{SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

const MAX_ITER: usize = 10_000;

fn eigen_failure(m: &CMatrix) -> Error {
    let diag = m.diagonal();
    let (diag_min, diag_max) = diag
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
    Error::EigenFailure {
        dim: m.nrows(),
        frobenius: m.norm(),
        diag_min,
        diag_max,
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_ITER).ok_or_else(|| eigen_failure(m))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenpairs of a Hermitian matrix, ascending; column `k` of the returned
/// matrix is the eigenvector of value `k`.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_ITER).ok_or_else(|| eigen_failure(m))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Singular values, descending. There are `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, MAX_ITER).ok_or(Error::SvdFailure {
        rows: m.nrows(),
        cols: m.ncols(),
    })?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Largest singular value (0 for an empty matrix).
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// `k`-th largest singular value counted from 1, with the convention that
/// missing singular values are zero.
pub fn kth_singular_value(values: &[f64], k: usize) -> f64 {
    if k == 0 {
        return f64::INFINITY;
    }
    values.get(k - 1).copied().unwrap_or(0.0)
}

/// Numerical rank by Gaussian elimination with complete pivoting; pivots below
/// `rel_tol · max|entry|` count as zero.
pub fn elimination_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let scale = m.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    if scale == 0.0 {
        return 0;
    }
    elimination_rank_abs(m, rel_tol * scale)
}

/// As [`elimination_rank`] with an absolute pivot threshold.
pub fn elimination_rank_abs(m: &CMatrix, threshold: f64) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<Complex64>> = (0..rows).map(|r| (0..cols).map(|c| m[(r, c)]).collect()).collect();
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0);
        for (r, row) in a.iter().enumerate().skip(step) {
            for (c, z) in row.iter().enumerate().skip(step) {
                if z.norm() > best.2 {
                    best = (r, c, z.norm());
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        a.swap(step, best.0);
        for row in a.iter_mut() {
            row.swap(step, best.1);
        }
        let pivot = a[step][step];
        for r in step + 1..rows {
            let factor = a[r][step] / pivot;
            if factor != Complex64::new(0.0, 0.0) {
                for c in step..cols {
                    let v = a[step][c];
                    a[r][c] -= factor * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}
