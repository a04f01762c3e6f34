//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! The channel covariance matrices this crate diagonalizes are small (order
//! of the channel count, <= ~100), dense, and symmetric, which is exactly the
//! regime where Jacobi iteration is simple, robust, and accurate: every sweep
//! applies one Givens rotation per off-diagonal entry, and the off-diagonal
//! mass shrinks quadratically once sweeps start to converge.

use crate::{Error, Result};

/// Hard cap on Jacobi sweeps; convergence for PSD covariance matrices is
/// typically reached in well under ten.
const MAX_SWEEPS: usize = 100;

/// Convergence: off-diagonal Frobenius mass relative to the input's norm.
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Result of [`symmetric_eigen`]: eigenvalues in descending order, paired
/// with unit eigenvectors (`vectors[k]` goes with `values[k]`).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSym {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn frobenius(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

fn off_diagonal_norm(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[i][j] * m[i][j];
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back sorted descending; equal eigenvalues keep the
/// order their columns reached on convergence, so the sort is stable and
/// reproducible. Every eigenvector is sign-fixed so its largest-magnitude
/// entry is positive (lowest index wins a magnitude tie), removing the sign
/// ambiguity inherent to eigenvectors.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> Result<EigenSym> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(
            "eigendecomposition needs a nonempty square matrix".into(),
        ));
    }
    let scale = frobenius(matrix);
    if !scale.is_finite() {
        return Err(Error::InvalidArgument(
            "eigendecomposition input has non-finite entries".into(),
        ));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (matrix[i][j] - matrix[j][i]).abs() > 1e-9 * scale.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }

    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut converged = off_diagonal_norm(&a) <= threshold;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= threshold;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi iteration did not converge within {MAX_SWEEPS} sweeps"
        )));
    }

    // Stable descending sort by eigenvalue; ties keep column order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &col in &order {
        values.push(a[col][col]);
        let mut vec_k: Vec<f64> = (0..n).map(|row| v[row][col]).collect();
        fix_sign(&mut vec_k);
        vectors.push(vec_k);
    }
    Ok(EigenSym { values, vectors })
}

/// One Jacobi rotation zeroing `a[p][q]` (and `a[q][p]`), accumulated into
/// the eigenvector matrix `v`.
fn rotate(a: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    // Smaller root of t^2 + 2 theta t - 1 = 0, the numerically stable choice.
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let (app, aqq) = (a[p][p], a[q][q]);
    a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for i in 0..a.len() {
        if i != p && i != q {
            let (aip, aiq) = (a[i][p], a[i][q]);
            a[i][p] = c * aip - s * aiq;
            a[p][i] = a[i][p];
            a[i][q] = s * aip + c * aiq;
            a[q][i] = a[i][q];
        }
    }
    for row in v.iter_mut() {
        let (vip, viq) = (row[p], row[q]);
        row[p] = c * vip - s * viq;
        row[q] = s * vip + c * viq;
    }
}

/// Flip a vector so its largest-magnitude entry is positive; on magnitude
/// ties the lowest index decides.
fn fix_sign(vec: &mut [f64]) {
    let mut best = 0;
    for (i, v) in vec.iter().enumerate().skip(1) {
        if v.abs() > vec[best].abs() {
            best = i;
        }
    }
    if vec[best] < 0.0 {
        for v in vec.iter_mut() {
            *v = -*v;
        }
    }
}

// ---------------------------------------------------------------------------
