//! Exact phase-I simplex for positive-vector feasibility.
//!
//! Given a basis matrix `B` (rows spanning a subspace of `Rat^n`), decides
//! whether some combination `v = Bᵀλ` satisfies `v ≥ 1` coordinatewise.
//! The program is written in standard form with free `λ` split into
//! `λ⁺ − λ⁻`, surplus variables, and one artificial variable per row; the
//! phase-I objective minimizes the artificial sum. Bland's rule guarantees
//! termination, and every pivot is an exact rational row operation.

use super::Matrix;
use crate::rational::Rat;
use num::{One, Signed, Zero};

/// Returns `λ` with `Bᵀλ ≥ 1` if one exists.
pub(super) fn feasible_combination(basis: &Matrix) -> Option<Vec<Rat>> {
    let k = basis.rows(); // number of λ coordinates
    let n = basis.cols(); // number of ≥ 1 constraints
    if n == 0 {
        return Some(vec![Rat::zero(); k]);
    }

    // Columns: λ⁺ (k) | λ⁻ (k) | surplus (n) | artificial (n), then RHS.
    let num_vars = 2 * k + 2 * n;
    let mut tab = vec![vec![Rat::zero(); num_vars + 1]; n];
    let a = basis.transpose(); // n×k, row i = constraint ⟨column i of B, λ⟩ ≥ 1
    for i in 0..n {
        for j in 0..k {
            tab[i][j] = a[(i, j)].clone();
            tab[i][k + j] = -a[(i, j)].clone();
        }
        tab[i][2 * k + i] = -Rat::one();
        tab[i][2 * k + n + i] = Rat::one();
        tab[i][num_vars] = Rat::one(); // RHS
    }
    let mut basis_var: Vec<usize> = (0..n).map(|i| 2 * k + n + i).collect();

    // Reduced-cost row for min Σ artificials with the artificial basis:
    // r_j = c_j − Σ_i tab[i][j].
    let mut cost = vec![Rat::zero(); num_vars + 1];
    for (j, c) in cost.iter_mut().enumerate().take(num_vars) {
        let col_sum = tab.iter().fold(Rat::zero(), |acc, row| acc + &row[j]);
        let direct = if j >= 2 * k + n { Rat::one() } else { Rat::zero() };
        *c = direct - col_sum;
    }

    // Bland: entering column = smallest index with negative reduced cost.
    while let Some(entering) = (0..num_vars).find(|&j| cost[j].is_negative()) {
        // Ratio test; ties broken by smallest basis variable (Bland).
        let mut leaving: Option<(usize, Rat)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[entering].is_positive() {
                continue;
            }
            let ratio = &row[num_vars] / &row[entering];
            let better = match &leaving {
                None => true,
                Some((li, lr)) => {
                    ratio < *lr || (ratio == *lr && basis_var[i] < basis_var[*li])
                }
            };
            if better {
                leaving = Some((i, ratio));
            }
        }
        let (pivot_row, _) = leaving?; // unbounded phase-I cannot happen, but bail safely

        // Pivot.
        let inv = Rat::one() / tab[pivot_row][entering].clone();
        for x in tab[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let pivot = tab[pivot_row].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == pivot_row || row[entering].is_zero() {
                continue;
            }
            let factor = row[entering].clone();
            for (x, p) in row.iter_mut().zip(&pivot) {
                *x -= &factor * p;
            }
        }
        if !cost[entering].is_zero() {
            let factor = cost[entering].clone();
            for (c, p) in cost.iter_mut().zip(&pivot) {
                *c -= &factor * p;
            }
        }
        basis_var[pivot_row] = entering;
    }

    // Feasible iff every artificial variable sits at zero.
    let artificial_mass = basis_var
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= 2 * k + n)
        .fold(Rat::zero(), |acc, (i, _)| acc + &tab[i][num_vars]);
    if !artificial_mass.is_zero() {
        return None;
    }

    let mut lambda = vec![Rat::zero(); k];
    for (i, &v) in basis_var.iter().enumerate() {
        if v < k {
            lambda[v] += &tab[i][num_vars];
        } else if v < 2 * k {
            lambda[v - k] -= &tab[i][num_vars];
        }
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat_int, Rat};
    use num::One;

    fn check(rows: Vec<Vec<i64>>, expect_feasible: bool) {
        let cols = rows[0].len();
        let m = Matrix::from_i64(rows);
        match feasible_combination(&m) {
            Some(lambda) => {
                assert!(expect_feasible, "unexpected witness {lambda:?}");
                let v = m.transpose().mul_vec(&lambda).unwrap();
                assert_eq!(v.len(), cols);
                assert!(v.iter().all(|x| *x >= Rat::one()));
            }
            None => assert!(!expect_feasible, "expected a witness"),
        }
    }

    #[test]
    fn feasibility_verdicts() {
        check(vec![vec![1, 1]], true);
        check(vec![vec![1, -1]], false);
        check(vec![vec![2, -1, 0], vec![0, 1, 1]], true);
        check(vec![vec![1, 0, -1], vec![0, 1, -1]], false);
        check(vec![vec![1, 0], vec![0, 1]], true);
    }

    #[test]
    fn degenerate_inputs() {
        // Zero row only: no positive combination exists.
        check(vec![vec![0, 0]], false);
        // λ = 0 required but constraints demand ≥ 1 in zero columns.
        let m = Matrix::zeros(0, 2);
        assert_eq!(feasible_combination(&m), None);
        let trivial = Matrix::zeros(0, 0);
        assert_eq!(feasible_combination(&trivial), Some(Vec::new()));
    }

    #[test]
    fn witness_is_exact() {
        let m = Matrix::from_i64(vec![vec![3, 5, 7]]);
        let lambda = feasible_combination(&m).unwrap();
        let v = m.transpose().mul_vec(&lambda).unwrap();
        assert!(v.iter().all(|x| *x >= rat_int(1)));
    }
}
