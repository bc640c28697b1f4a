//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Gram matrix over `[−σ, σ]` written out directly:
/// `(1/2π)∫_{−σ}^{σ} e^{iωt} dt = (σ/π)·sinc(σω)`, real and symmetric.
pub fn symmetric_gram(points: &[f64], sigma: f64) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&a| points.iter().map(|&b| sigma / PI * sinc(sigma * (b - a))).collect())
        .collect()
}

/// Extreme eigenvalues of the Gram matrix over `[−σ, σ]`.
pub fn symmetric_gram_extremes(points: &[f64], sigma: f64) -> (f64, f64) {
    let ev = jacobi_eigenvalues(symmetric_gram(points, sigma));
    (ev[0], ev[ev.len() - 1])
}

/// Minimum pairwise distance by checking every pair.
pub fn brute_min_distance(points: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a - b).abs());
        }
    }
    best
}

/// Min and max number of points in `[a, a + l)` for `a` on a fine grid of the
/// admissible range `[w0, w1 − l]`.
pub fn brute_window_counts(points: &[f64], window: (f64, f64), l: f64, steps: usize) -> (usize, usize) {
    let span = window.1 - l - window.0;
    let mut lo = usize::MAX;
    let mut hi = 0;
    for k in 0..=steps {
        let a = window.0 + span * k as f64 / steps as f64;
        // Same half-open convention, insensitive to last-bit rounding of a + l.
        let tol = 1e-9;
        let c = points.iter().filter(|&&x| a - tol <= x && x < a + l - tol).count();
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (lo, hi)
}

/// `(1/√2π)∫ F(t) e^{−ixt} dt` by a fine composite Simpson rule on each
/// interval, for `F` given pointwise.
pub fn simpson_transform(
    intervals: &[(f64, f64)],
    f: impl Fn(f64) -> num_complex::Complex64,
    x: f64,
    panels: usize,
) -> num_complex::Complex64 {
    let mut total = num_complex::Complex64::new(0.0, 0.0);
    for &(a, b) in intervals {
        let n = 2 * panels;
        let h = (b - a) / n as f64;
        for k in 0..=n {
            let t = a + h * k as f64;
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            total += f(t) * num_complex::Complex64::cis(-x * t) * (w * h / 3.0);
        }
    }
    total / (2.0 * PI).sqrt()
}

/// Determinant of a small complex matrix by Gaussian elimination with
/// partial pivoting.
pub fn complex_det(m: &[Vec<num_complex::Complex64>]) -> num_complex::Complex64 {
    let n = m.len();
    let mut a: Vec<Vec<num_complex::Complex64>> = m.to_vec();
    let mut det = num_complex::Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())).unwrap();
        if a[p][c].norm() == 0.0 {
            return num_complex::Complex64::new(0.0, 0.0);
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

/// Eigenvalues of a Hermitian matrix `A + iB` from the real symmetric
/// embedding `[[A, −B], [B, A]]`, which repeats each eigenvalue twice.
pub fn hermitian_eigenvalues(m: &[Vec<num_complex::Complex64>]) -> Vec<f64> {
    let n = m.len();
    let mut e = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            e[i][j] = m[i][j].re;
            e[i + n][j + n] = m[i][j].re;
            e[i][j + n] = -m[i][j].im;
            e[i + n][j] = m[i][j].im;
        }
    }
    jacobi_eigenvalues(e).into_iter().step_by(2).collect()
}

/// Rank of the column family `cols` (each of length `n`) from the Gram
/// eigenvalues, counting those above `tol`.
pub fn gram_rank(cols: &[Vec<num_complex::Complex64>], tol: f64) -> usize {
    let k = cols.len();
    let g: Vec<Vec<num_complex::Complex64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum())
                .collect()
        })
        .collect();
    hermitian_eigenvalues(&g).into_iter().filter(|&v| v > tol).count()
}
