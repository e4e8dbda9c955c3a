//! Log-parametrized equilibria sets and concentration robustness.
//!
//! An LP set `E(P, x*)` collects the positive points whose log-deviation from
//! a positive reference point `x*` lies in `P^⊥`; `P` is the flux subspace
//! and `P^⊥` the parameter subspace. A species has concentration robustness
//! on such a set exactly when the parameter subspace is contained in that
//! species' coordinate hyperplane, equivalently when the species' column is
//! zero in every row of the canonical parameter basis. That containment test
//! is exact rational arithmetic; only the Birch-point solver and the
//! log-coordinate chart touch floating point.
//!
//! The number of robust species can never exceed `dim P`: the parameter
//! subspace has dimension `m − dim P`, and each robust species removes one
//! coordinate from its support.

use crate::linalg::SubspaceBasis;
use crate::network::Network;
use crate::numeric::{dot, norm, orthonormal_rows, projection_norm, solve_dense};
use crate::rational::{all_positive, rat_to_f64, Rat};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RobustnessError {
    #[error("reference point must be strictly positive")]
    NonPositiveReference,
    #[error("reference point has length {got}, expected {expected}")]
    ReferenceLengthMismatch { expected: usize, got: usize },
    #[error("species index {0} out of range ({1} species)")]
    UnknownSpecies(usize, usize),
    #[error("point has length {got}, expected {expected}")]
    PointLengthMismatch { expected: usize, got: usize },
    #[error("point must be strictly positive")]
    NonPositivePoint,
    #[error("point is not in the LP set: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotInLpSet { residual: f64, tolerance: f64 },
    #[error("Birch-point iteration failed to converge: flux residual {flux_residual:.3e}, LP residual {lp_residual:.3e} after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        flux_residual: f64,
        lp_residual: f64,
    },
    #[error("flux subspace ambient dimension {flux} does not match reference length {reference}")]
    AmbientMismatch { flux: usize, reference: usize },
}

/// How an LP set arose; `Plp` labels positive equilibria, `Clp` complex
/// balanced equilibria. The mathematics downstream is identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    Plp,
    Clp,
    Generic,
}

/// The robustness label matching an LP kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustKind {
    Acr,
    Bcr,
    Generic,
}

impl LpKind {
    pub fn robust_kind(self) -> RobustKind {
        match self {
            LpKind::Plp => RobustKind::Acr,
            LpKind::Clp => RobustKind::Bcr,
            LpKind::Generic => RobustKind::Generic,
        }
    }
}

/// An LP set `E(P, x*)`: flux subspace plus strictly positive reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSet {
    kind: LpKind,
    flux: SubspaceBasis,
    reference: Vec<Rat>,
}

impl LpSet {
    pub fn new(kind: LpKind, flux: SubspaceBasis, reference: Vec<Rat>) -> Result<Self, RobustnessError> {
        if reference.len() != flux.ambient_dim() {
            return Err(RobustnessError::AmbientMismatch {
                flux: flux.ambient_dim(),
                reference: reference.len(),
            });
        }
        if !all_positive(&reference) {
            return Err(RobustnessError::NonPositiveReference);
        }
        Ok(LpSet {
            kind,
            flux,
            reference,
        })
    }

    pub fn kind(&self) -> LpKind {
        self.kind
    }

    pub fn flux_subspace(&self) -> &SubspaceBasis {
        &self.flux
    }

    pub fn reference_point(&self) -> &[Rat] {
        &self.reference
    }

    pub fn ambient_dim(&self) -> usize {
        self.flux.ambient_dim()
    }

    /// `P^⊥`, the parameter subspace.
    pub fn parameter_subspace(&self) -> SubspaceBasis {
        self.flux.orthogonal_complement()
    }

    /// Species hyperplane criterion for one species: robustness holds iff the
    /// parameter subspace is contained in `{x : x_species = 0}`.
    pub fn has_robustness_in(&self, species: usize) -> Result<bool, RobustnessError> {
        has_robustness_in(&self.flux, species)
    }

    /// Full robustness report; see [`robust_species`].
    pub fn robust_species(&self) -> RobustnessReport {
        robust_species(&self.flux, self.kind.robust_kind())
    }

    /// Coefficients of `log x − log x*` in the canonical parameter basis.
    ///
    /// Fails when the log-deviation is farther than `tolerance` from `P^⊥`
    /// (i.e. the point does not lie in the LP set). Reconstructing
    /// `x* · exp(basisᵀ · coeffs)` recovers `x` within float accuracy.
    pub fn log_coordinates(&self, x: &[f64], tolerance: f64) -> Result<Vec<f64>, RobustnessError> {
        let m = self.ambient_dim();
        if x.len() != m {
            return Err(RobustnessError::PointLengthMismatch {
                expected: m,
                got: x.len(),
            });
        }
        if x.iter().any(|&v| v <= 0.0) {
            return Err(RobustnessError::NonPositivePoint);
        }
        let y: Vec<f64> = x
            .iter()
            .zip(&self.reference)
            .map(|(xv, r)| xv.ln() - rat_to_f64(r).ln())
            .collect();

        let basis = basis_f64(&self.parameter_subspace());
        let d = basis.len();
        if d == 0 {
            let residual = norm(&y);
            if residual > tolerance {
                return Err(RobustnessError::NotInLpSet {
                    residual,
                    tolerance,
                });
            }
            return Ok(Vec::new());
        }
        // Normal equations (B Bᵀ) c = B y; d is small.
        let gram: Vec<Vec<f64>> = basis
            .iter()
            .map(|bi| basis.iter().map(|bj| dot(bi, bj)).collect())
            .collect();
        let rhs: Vec<f64> = basis.iter().map(|b| dot(b, &y)).collect();
        let coeffs = solve_dense(gram, rhs).expect("Gram matrix of a basis is invertible");

        let mut residual_vec = y.clone();
        for (c, b) in coeffs.iter().zip(&basis) {
            for (rv, bv) in residual_vec.iter_mut().zip(b) {
                *rv -= c * bv;
            }
        }
        let residual = norm(&residual_vec);
        if residual > tolerance {
            return Err(RobustnessError::NotInLpSet {
                residual,
                tolerance,
            });
        }
        Ok(coeffs)
    }

    /// The unique intersection of this LP set with the flux class through `q`
    /// (the positive coset `q + P`), found by damped Newton from `x*`.
    pub fn birch_point(&self, q: &[f64]) -> Result<BirchPoint, RobustnessError> {
        self.birch_point_from(q, None)
    }

    /// Same solver with an explicit initial coefficient vector in the
    /// parameter basis; used to confirm that restarts land on one point.
    pub fn birch_point_from(
        &self,
        q: &[f64],
        initial_coeffs: Option<&[f64]>,
    ) -> Result<BirchPoint, RobustnessError> {
        const MAX_ITER: usize = 200;
        const TOL: f64 = 1e-12;

        let m = self.ambient_dim();
        if q.len() != m {
            return Err(RobustnessError::PointLengthMismatch {
                expected: m,
                got: q.len(),
            });
        }
        if q.iter().any(|&v| v <= 0.0) {
            return Err(RobustnessError::NonPositivePoint);
        }

        let xref: Vec<f64> = self.reference.iter().map(rat_to_f64).collect();
        let basis = basis_f64(&self.parameter_subspace()); // rows span P^⊥
        let d = basis.len();
        let flux_on = orthonormal_rows(&basis_f64(&self.flux));
        let param_on = orthonormal_rows(&basis);

        // x(θ) = x* ⊙ exp(Bᵀθ) keeps log x − log x* in P^⊥ by construction;
        // the root condition B·(x(θ) − q) = 0 places x in the flux class q + P.
        // Its Jacobian B·diag(x)·Bᵀ is positive definite, so the damped Newton
        // iteration minimizes a strictly convex merit function.
        let mut theta = vec![0.0; d];
        if let Some(init) = initial_coeffs {
            theta[..d.min(init.len())].copy_from_slice(&init[..d.min(init.len())]);
        }
        let x_of = |theta: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|j| {
                    let exponent: f64 = basis.iter().zip(theta).map(|(b, t)| b[j] * t).sum();
                    xref[j] * exponent.exp()
                })
                .collect()
        };
        let residual_of = |x: &[f64]| -> Vec<f64> {
            basis
                .iter()
                .map(|b| b.iter().zip(x.iter().zip(q)).map(|(bv, (xv, qv))| bv * (xv - qv)).sum())
                .collect()
        };

        let mut x = x_of(&theta);
        let mut g = residual_of(&x);
        let mut iterations = 0;
        for _ in 0..MAX_ITER {
            let lp_residual = projection_norm(&log_deviation(&x, &xref), &flux_on);
            let flux_residual = {
                let diff: Vec<f64> = x.iter().zip(q).map(|(a, b)| a - b).collect();
                projection_norm(&diff, &param_on)
            };
            if flux_residual < TOL && lp_residual < TOL {
                return Ok(BirchPoint {
                    point: x,
                    iterations,
                    flux_class_residual: flux_residual,
                    lp_residual,
                });
            }
            if d == 0 {
                break;
            }

            let jac: Vec<Vec<f64>> = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|k| (0..m).map(|j| basis[i][j] * x[j] * basis[k][j]).sum())
                        .collect()
                })
                .collect();
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let Some(step) = solve_dense(jac, rhs) else {
                break;
            };

            let base = norm(&g);
            let mut alpha = 1.0;
            let mut advanced = false;
            for _ in 0..60 {
                let candidate: Vec<f64> =
                    theta.iter().zip(&step).map(|(t, s)| t + alpha * s).collect();
                let cx = x_of(&candidate);
                let cg = residual_of(&cx);
                if norm(&cg) < base {
                    theta = candidate;
                    x = cx;
                    g = cg;
                    advanced = true;
                    break;
                }
                alpha *= 0.5;
            }
            iterations += 1;
            if !advanced {
                break;
            }
        }

        let lp_residual = projection_norm(&log_deviation(&x, &xref), &flux_on);
        let flux_residual = {
            let diff: Vec<f64> = x.iter().zip(q).map(|(a, b)| a - b).collect();
            projection_norm(&diff, &param_on)
        };
        if flux_residual < TOL && lp_residual < TOL {
            return Ok(BirchPoint {
                point: x,
                iterations,
                flux_class_residual: flux_residual,
                lp_residual,
            });
        }
        Err(RobustnessError::NoConvergence {
            iterations,
            flux_residual,
            lp_residual,
        })
    }
}

fn log_deviation(x: &[f64], xref: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(xref)
        .map(|(a, b)| a.ln() - b.ln())
        .collect()
}

fn basis_f64(s: &SubspaceBasis) -> Vec<Vec<f64>> {
    s.basis_rows()
        .iter()
        .map(|row| row.iter().map(rat_to_f64).collect())
        .collect()
}

/// Result of the Birch-point solver, with both membership residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct BirchPoint {
    pub point: Vec<f64>,
    pub iterations: usize,
    /// Norm of the projection of `x − q` onto `P^⊥` (flux-class membership).
    pub flux_class_residual: f64,
    /// Norm of the projection of `log x − log x*` onto `P` (LP-set membership).
    pub lp_residual: f64,
}

/// Robust species of an LP set, read off the canonical parameter basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustnessReport {
    pub kind: RobustKind,
    /// Species whose coordinate is zero in every parameter basis row.
    pub robust_species: Vec<usize>,
    pub parameter_basis: SubspaceBasis,
    /// `dim P`, the upper bound for the number of robust species.
    pub bound: usize,
    /// Per-species flag: true when the species' basis column is all zero.
    pub zero_columns: Vec<bool>,
}

/// Species hyperplane criterion via explicit subspace containment.
pub fn has_robustness_in(flux: &SubspaceBasis, species: usize) -> Result<bool, RobustnessError> {
    let m = flux.ambient_dim();
    if species >= m {
        return Err(RobustnessError::UnknownSpecies(species, m));
    }
    let hyperplane = SubspaceBasis::from_rows(
        m,
        (0..m)
            .filter(|&j| j != species)
            .map(|j| {
                let mut row = vec![Rat::from_integer(0.into()); m];
                row[j] = Rat::from_integer(1.into());
                row
            })
            .collect(),
    );
    Ok(flux
        .orthogonal_complement()
        .is_subspace_of(&hyperplane)
        .expect("ambient dimensions agree"))
}

/// Scans the canonical parameter basis: a species is robust exactly when its
/// column is zero in every basis row. The report always satisfies
/// `|robust| ≤ dim P`.
pub fn robust_species(flux: &SubspaceBasis, kind: RobustKind) -> RobustnessReport {
    let parameter = flux.orthogonal_complement();
    let m = flux.ambient_dim();
    let rows = parameter.basis_rows();
    let zero_columns: Vec<bool> = (0..m)
        .map(|j| rows.iter().all(|row| row[j] == Rat::from_integer(0.into())))
        .collect();
    let robust: Vec<usize> = zero_columns
        .iter()
        .enumerate()
        .filter(|(_, &z)| z)
        .map(|(j, _)| j)
        .collect();
    let bound = flux.dim();
    assert!(
        robust.len() <= bound,
        "robust species count {} exceeds dim P = {bound}; the parameter basis is corrupt",
        robust.len()
    );
    RobustnessReport {
        kind,
        robust_species: robust,
        parameter_basis: parameter,
        bound,
        zero_columns,
    }
}

/// True when the two LP sets share the same flux subspace, i.e. the system is
/// bi-LP and the positive and complex balanced equilibria coincide.
pub fn bi_lp_check(plp: &LpSet, clp: &LpSet) -> bool {
    plp.flux_subspace() == clp.flux_subspace()
}

/// Consistency conclusions for a mass-action LP set whose flux subspace is
/// the stoichiometric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservativityDiagnostics {
    pub conservative: bool,
    pub positive_witness: Option<Vec<Rat>>,
    pub robust_species: Vec<usize>,
    /// False exactly when the inputs claim both conservativity and a
    /// nonempty robust set, which no LP mass action system can realize.
    pub consistent: bool,
    pub conclusion: ConservativityConclusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservativityConclusion {
    /// Conservative, hence no species can be robust on this LP set.
    ConservativeNoRobustness,
    /// Robust species exist, hence the network is nonconservative.
    RobustHenceNonconservative,
    /// Nonconservative with an empty robust set; nothing further follows.
    NoFinding,
    /// Contradictory inputs: conservative and robust simultaneously.
    Inconsistent,
}

/// Checks the implication "robust species ⇒ nonconservative" for a mass
/// action LP set with flux subspace equal to the stoichiometric subspace.
pub fn conservativity_diagnostics(net: &Network, lp_flux: &SubspaceBasis) -> ConservativityDiagnostics {
    let witness = net
        .stoichiometric_subspace()
        .orthogonal_complement()
        .positive_vector();
    let conservative = witness.is_some();
    let report = robust_species(lp_flux, RobustKind::Generic);
    let robust = report.robust_species;
    let conclusion = match (conservative, robust.is_empty()) {
        (true, true) => ConservativityConclusion::ConservativeNoRobustness,
        (true, false) => ConservativityConclusion::Inconsistent,
        (false, false) => ConservativityConclusion::RobustHenceNonconservative,
        (false, true) => ConservativityConclusion::NoFinding,
    };
    ConservativityDiagnostics {
        conservative,
        positive_witness: witness,
        robust_species: robust,
        consistent: conclusion != ConservativityConclusion::Inconsistent,
        conclusion,
    }
}
