//! Small dense `f64` helpers shared by the Birch-point solver and the
//! numeric equilibrium search. Everything exact stays in `linalg`; this
//! module only exists for the few places where logarithms force floats.

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for a (numerically) singular system.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for (row, rhs) in a.iter().zip(&b) {
        debug_assert_eq!(row.len(), n);
        debug_assert!(rhs.is_finite() || true);
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = 1.0 / a[col][col];
        let pivot_row = a[col].clone();
        let pivot_rhs = b[col];
        for (r, row) in a.iter_mut().enumerate() {
            if r == col {
                continue;
            }
            let factor = row[col] * inv;
            if factor == 0.0 {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= factor * p;
            }
            b[r] -= factor * pivot_rhs;
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Modified Gram-Schmidt; rows with norm below `1e-12` after projection are
/// dropped. Input rows are assumed exactly independent (they come from
/// exact-rational bases), so nothing should be dropped in practice.
pub(crate) fn orthonormal_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for u in &basis {
            let proj = dot(&v, u);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = norm(&v);
        if n > 1e-12 {
            for x in v.iter_mut() {
                *x /= n;
            }
            basis.push(v);
        }
    }
    basis
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Euclidean norm of the projection of `v` onto the span of orthonormal rows.
pub(crate) fn projection_norm(v: &[f64], orthonormal: &[Vec<f64>]) -> f64 {
    orthonormal
        .iter()
        .map(|u| dot(v, u).powi(2))
        .sum::<f64>()
        .sqrt()
}
