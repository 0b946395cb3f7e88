//! Small dense complex linear algebra on coefficient vectors.

use nalgebra::DMatrix;

use crate::space::Scalar;

fn matrix(columns: &[Vec<Scalar>]) -> DMatrix<Scalar> {
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    DMatrix::from_fn(rows, columns.len(), |i, j| {
        columns[j].get(i).copied().unwrap_or_default()
    })
}

/// Smallest singular value of the matrix with the given columns; zero when
/// there are more columns than rows.
pub fn min_singular_value(columns: &[Vec<Scalar>]) -> f64 {
    if columns.is_empty() {
        return f64::INFINITY;
    }
    let m = matrix(columns);
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Least-squares residual `v - P v` of `v` against the span of `columns`.
pub fn span_residual(columns: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    if columns.is_empty() {
        return v.to_vec();
    }
    let rows = columns
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
        .max(v.len());
    let m = DMatrix::from_fn(rows, columns.len(), |i, j| {
        columns[j].get(i).copied().unwrap_or_default()
    });
    let b = DMatrix::from_fn(rows, 1, |i, _| v.get(i).copied().unwrap_or_default());
    let x = m
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .unwrap_or_else(|_| DMatrix::zeros(columns.len(), 1));
    let r = b - m * x;
    r.iter().copied().collect()
}
