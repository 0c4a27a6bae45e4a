// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small dense linear algebra on row-major `Vec<Vec<T>>` matrices.
//!
//! Dimensions here never exceed a handful (the continuous part of a process,
//! or the Cox coefficient vector), so plain Gaussian elimination is enough.

use crate::num::Scalar;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `rel_tol` times the largest
/// absolute entry of `a`.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T], rel_tol: T) -> Option<Vec<T>> {
    let n = b.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() <= rel_tol * scale {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == T::zero() {
                continue;
            }
            for k in col..=n {
                let v = m[col][k];
                m[row][k] = m[row][k] - factor * v;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in row + 1..n {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky<T: Scalar>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum = sum - l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= T::zero() {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

pub fn is_symmetric<T: Scalar>(a: &[Vec<T>]) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| (a[i][j] - a[j][i]).abs() <= T::slack(a[i][j])))
}

/// Positive semidefiniteness via Cholesky of `a + tiny * I`.
pub fn is_psd<T: Scalar>(a: &[Vec<T>]) -> bool {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    let bump = T::epsilon().sqrt() * (T::one() + scale);
    let shifted: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { a[i][j] + bump } else { a[i][j] })
                .collect()
        })
        .collect();
    cholesky(&shifted).is_some()
}

pub fn is_pd<T: Scalar>(a: &[Vec<T>]) -> bool {
    cholesky(a).is_some()
}

pub fn mat_vec<T: Scalar>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(T::zero(), |s, (&r, &v)| s + r * v))
        .collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}
