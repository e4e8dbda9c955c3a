//! Exact rational matrices and subspace algebra.
//!
//! Everything here runs over [`Rat`] with no rounding: reduced row echelon
//! form, rank, kernels, orthogonal complements, sums and intersections of
//! subspaces, containment tests, and strictly-positive-vector feasibility.
//!
//! Subspaces are kept in a canonical form: the row span is reduced to RREF and
//! zero rows are dropped, so two equal subspaces always have *identical*
//! representations. That makes identities such as `(V^⊥)^⊥ = V` testable as
//! plain equality.

mod simplex;

use crate::rational::{rat_display, Rat};
use num::{One, Zero};
use std::fmt;
use thiserror::Error;

/// Errors from subspace operations that combine operands.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("matrix dimension mismatch: {0}")]
    ShapeMismatch(String),
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must share a length;
    /// `cols` disambiguates the zero-row case.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            assert_eq!(row.len(), cols, "row length != cols");
            data.extend(row.iter().cloned());
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Convenience constructor from integer literals, mostly for tests.
    pub fn from_i64(rows: Vec<Vec<i64>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(
            cols,
            rows.into_iter()
                .map(|r| r.into_iter().map(crate::rational::rat_int).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = a * &other[(k, c)];
                    out[(r, c)] += prod;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} * vec{}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(rat_display).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form and the (strictly increasing) pivot columns.
///
/// The RREF of a matrix over the rationals is unique, so this doubles as a
/// canonical form for row spans. Gauss-Jordan elimination, exact arithmetic.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut pivot_row = 0;

    for col in 0..a.cols {
        if pivot_row >= a.rows {
            break;
        }
        let Some(found) = (pivot_row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if found != pivot_row {
            for c in 0..a.cols {
                let tmp = a[(found, c)].clone();
                a[(found, c)] = a[(pivot_row, c)].clone();
                a[(pivot_row, c)] = tmp;
            }
        }
        let inv = {
            let p = a[(pivot_row, col)].clone();
            Rat::one() / p
        };
        for c in col..a.cols {
            let scaled = &a[(pivot_row, c)] * &inv;
            a[(pivot_row, c)] = scaled;
        }
        for r in 0..a.rows {
            if r == pivot_row || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone();
            for c in col..a.cols {
                let delta = &factor * &a[(pivot_row, c)];
                a[(r, c)] -= delta;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }

    (a, pivots)
}

/// Number of pivots of the RREF.
pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Canonical basis of `{x : m·x = 0}`; dimension is `cols − rank`.
pub fn kernel_basis(m: &Matrix) -> SubspaceBasis {
    SubspaceBasis::from_rows(m.cols(), kernel_parametrization(m))
}

/// Kernel vectors in free-variable form: one vector per non-pivot column of
/// the RREF, with that coordinate set to one and the pivot coordinates
/// expressing it. This is the parametrization elimination produces directly
/// (e.g. "each pivot variable in terms of the free variables"), handy for
/// display; `kernel_basis` canonicalizes the same vectors.
pub fn kernel_parametrization(m: &Matrix) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(m);
    let n = m.cols();
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; n];
        for (row, &col) in pivots.iter().enumerate() {
            v[col] = Some(row);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec = vec![Rat::zero(); n];
        vec[free] = Rat::one();
        for (col, maybe_row) in pivot_set.iter().enumerate() {
            if let Some(row) = maybe_row {
                vec[col] = -r[(*row, free)].clone();
            }
        }
        basis.push(vec);
    }
    basis
}

/// A linear subspace of `Rat^ambient`, stored as the unique RREF basis of its
/// row span. Equality of values is equality of subspaces.
#[derive(Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    basis: Matrix,
}

impl SubspaceBasis {
    /// Canonicalizes arbitrary spanning rows: RREF, zero rows dropped.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rat>>) -> Self {
        for row in &rows {
            assert_eq!(row.len(), ambient, "spanning row has wrong length");
        }
        let (reduced, pivots) = rref(&Matrix::from_rows(ambient, rows));
        let kept = (0..pivots.len()).map(|r| reduced.row(r).to_vec()).collect();
        SubspaceBasis {
            ambient,
            basis: Matrix::from_rows(ambient, kept),
        }
    }

    /// The zero subspace of `Rat^ambient` (empty basis).
    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis {
            ambient,
            basis: Matrix::zeros(0, ambient),
        }
    }

    /// The full space `Rat^ambient`.
    pub fn full(ambient: usize) -> Self {
        SubspaceBasis {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// The canonical RREF basis matrix (`dim × ambient`).
    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Rat>> {
        self.basis.row_vecs()
    }

    /// Basis of `{x : ⟨x, b⟩ = 0 for every basis row b}`.
    ///
    /// Applying this twice returns the original value exactly, thanks to the
    /// canonical representation.
    pub fn orthogonal_complement(&self) -> SubspaceBasis {
        kernel_basis(&self.basis)
    }

    /// Span of the union of all parts' rows.
    pub fn sum(parts: &[&SubspaceBasis]) -> Result<SubspaceBasis, LinalgError> {
        let ambient = match parts.first() {
            Some(p) => p.ambient,
            None => return Ok(SubspaceBasis::zero(0)),
        };
        let mut rows = Vec::new();
        for p in parts {
            if p.ambient != ambient {
                return Err(LinalgError::AmbientMismatch {
                    left: ambient,
                    right: p.ambient,
                });
            }
            rows.extend(p.basis_rows());
        }
        Ok(SubspaceBasis::from_rows(ambient, rows))
    }

    /// Intersection via `(a^⊥ + b^⊥)^⊥`.
    pub fn intersection(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
        self.check_ambient(other)?;
        let sum = SubspaceBasis::sum(&[&self.orthogonal_complement(), &other.orthogonal_complement()])?;
        Ok(sum.orthogonal_complement())
    }

    /// True when every basis row of `self` lies in the span of `other`.
    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(self.basis_rows().iter().all(|row| other.contains(row)))
    }

    /// Exact membership test for a single vector.
    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector has wrong length");
        let mut residue = v.to_vec();
        for row_idx in 0..self.basis.rows() {
            let row = self.basis.row(row_idx);
            let lead = row
                .iter()
                .position(|x| x.is_one())
                .expect("canonical basis row has a unit pivot");
            if residue[lead].is_zero() {
                continue;
            }
            let factor = residue[lead].clone();
            for (res, b) in residue.iter_mut().zip(row) {
                *res -= &factor * b;
            }
        }
        residue.iter().all(Rat::is_zero)
    }

    /// True when `dim(sum of parts) = Σ dim(part)`.
    pub fn is_direct_sum(parts: &[&SubspaceBasis]) -> Result<bool, LinalgError> {
        let total: usize = parts.iter().map(|p| p.dim()).sum();
        Ok(SubspaceBasis::sum(parts)?.dim() == total)
    }

    /// Searches for a vector of the span with every coordinate ≥ 1
    /// (equivalently, a strictly positive vector up to scaling).
    ///
    /// Decided exactly by a phase-I simplex with Bland's rule on
    /// `{v = Bᵀλ, v ≥ 1}`; the returned witness is re-verified coordinate by
    /// coordinate before being handed out.
    pub fn positive_vector(&self) -> Option<Vec<Rat>> {
        if self.ambient == 0 {
            return Some(Vec::new());
        }
        let witness = simplex::feasible_combination(&self.basis)?;
        let v = self
            .basis
            .transpose()
            .mul_vec(&witness)
            .expect("dimensions agree by construction");
        let one = Rat::one();
        assert!(
            v.iter().all(|x| *x >= one),
            "simplex returned an infeasible witness"
        );
        debug_assert!(self.contains(&v));
        Some(v)
    }

    fn check_ambient(&self, other: &SubspaceBasis) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SubspaceBasis(dim {} in R^{}) {:?}",
            self.dim(),
            self.ambient,
            self.basis
        )
    }
}
