//! Reaction-network representation of evolutionary games with replicator
//! dynamics.
//!
//! A game on `m` strategies with nonnegative poly-power-law payoffs
//! `f_p(x) = Σ_t a_pt · x^{g^p_t}` becomes the network
//! `{X_i → 2X_i, 2X_i → X_i}` where the forward rate is `X_i · f_i(x)` and
//! the backward rate is `X_i · φ(x)` with `φ = Σ_p X_p f_p(x)` the average
//! payoff. The species formation rate then reproduces the replicator vector
//! field `ẋ_i = x_i (f_i(x) − φ(x))`.
//!
//! When, for every term index `t` and species `j`, the off-diagonal
//! exponents `{g^p_{tj} : p ≠ j}` agree on a single value different from the
//! diagonal exponent `g^j_{tj}`, every power-law summand of the induced
//! kinetics is `T̂`-rank maximal. The network is weakly reversible with
//! `n − ℓ = m`, so zero kinetic deficiency forces the kinetic order subspace
//! to be all of species space, the parameter subspace collapses to zero, and
//! the game has exactly one positive equilibrium with every species
//! concentration robust. [`uniqueness_report`] recomputes each link of that
//! chain instead of assuming it.

use crate::kinetics::{
    is_pl_tik, kinetic_deficiency, kinetic_order_subspace, PolyPlKinetics, PowerLawKinetics,
    KineticsError,
};
use crate::network::{Complex, Network, NetworkError, StructuralReport};
use crate::rational::{rat_int, Rat};
use crate::robustness::{robust_species, RobustKind, RobustnessReport};
use num::Signed;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplicatorError {
    #[error("a replicator game needs at least one species")]
    NoSpecies,
    #[error("payoff {payoff} has {got} terms, expected {expected}")]
    TermCountMismatch {
        payoff: usize,
        expected: usize,
        got: usize,
    },
    #[error("payoff {payoff} term {term} has {got} exponents, expected {expected}")]
    ExponentLengthMismatch {
        payoff: usize,
        term: usize,
        expected: usize,
        got: usize,
    },
    #[error("payoff {payoff} term {term} has a negative coefficient; the representation needs nonnegative payoffs")]
    NegativeCoefficient { payoff: usize, term: usize },
    #[error("the off-diagonal exponent condition fails; see the condition report")]
    ConditionFailed(ConditionReport),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Payoff functions of an `m`-strategy game: payoff `p` is
/// `Σ_t coefficients[p][t] · x^{exponents[p][t]}`, all payoffs sharing the
/// same term count. Term order is significant (the condition below aligns
/// term `t` across payoffs), so terms are kept exactly as given.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffSystem {
    species: Vec<String>,
    term_count: usize,
    coefficients: Vec<Vec<Rat>>,
    exponents: Vec<Vec<Vec<Rat>>>,
}

impl PayoffSystem {
    pub fn new(
        species: Vec<String>,
        payoffs: Vec<Vec<(Rat, Vec<Rat>)>>,
    ) -> Result<Self, ReplicatorError> {
        let m = species.len();
        if m == 0 {
            return Err(ReplicatorError::NoSpecies);
        }
        assert_eq!(payoffs.len(), m, "one payoff function per species");
        let term_count = payoffs.first().map_or(0, Vec::len);
        let mut coefficients = Vec::with_capacity(m);
        let mut exponents = Vec::with_capacity(m);
        for (p, terms) in payoffs.into_iter().enumerate() {
            if terms.len() != term_count {
                return Err(ReplicatorError::TermCountMismatch {
                    payoff: p,
                    expected: term_count,
                    got: terms.len(),
                });
            }
            let mut coeff_row = Vec::with_capacity(term_count);
            let mut exp_row = Vec::with_capacity(term_count);
            for (t, (coeff, exps)) in terms.into_iter().enumerate() {
                if exps.len() != m {
                    return Err(ReplicatorError::ExponentLengthMismatch {
                        payoff: p,
                        term: t,
                        expected: m,
                        got: exps.len(),
                    });
                }
                if coeff.is_negative() {
                    return Err(ReplicatorError::NegativeCoefficient { payoff: p, term: t });
                }
                coeff_row.push(coeff);
                exp_row.push(exps);
            }
            coefficients.push(coeff_row);
            exponents.push(exp_row);
        }
        Ok(PayoffSystem {
            species,
            term_count,
            coefficients,
            exponents,
        })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn term_count(&self) -> usize {
        self.term_count
    }

    /// Payoff values at a positive point.
    pub fn payoff_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.species.len())
            .map(|p| {
                (0..self.term_count)
                    .map(|t| {
                        let mono: f64 = self.exponents[p][t]
                            .iter()
                            .zip(x)
                            .map(|(g, &xv)| xv.powf(crate::rational::rat_to_f64(g)))
                            .product();
                        crate::rational::rat_to_f64(&self.coefficients[p][t]) * mono
                    })
                    .sum()
            })
            .collect()
    }
}

/// The `2m`-reaction network `{X_i → 2X_i, 2X_i → X_i}`: `2m` complexes in
/// `m` linkage classes, weakly reversible, cycle terminal, deficiency zero.
pub fn build_replicator_network(species: &[String]) -> Result<Network, ReplicatorError> {
    if species.is_empty() {
        return Err(ReplicatorError::NoSpecies);
    }
    let mut reactions = Vec::with_capacity(2 * species.len());
    for i in 0..species.len() {
        let single = Complex::new(vec![(i, rat_int(1))]).expect("nonnegative");
        let double = Complex::new(vec![(i, rat_int(2))]).expect("nonnegative");
        reactions.push((format!("f{}", i + 1), single.clone(), double.clone()));
        reactions.push((format!("b{}", i + 1), double, single));
    }
    Ok(Network::new(species.to_vec(), reactions)?)
}

/// Poly-power-law kinetics of the replicator representation, in canonical
/// form. Reaction order matches [`build_replicator_network`]: forward and
/// backward for species 1, then species 2, and so on. Rate constants default
/// to one; the uniqueness conclusion is rate-independent.
pub fn replicator_kinetics(payoffs: &PayoffSystem) -> Result<PolyPlKinetics, ReplicatorError> {
    let m = payoffs.species.len();
    let mut reactions = Vec::with_capacity(2 * m);
    for i in 0..m {
        // Forward: X_i · f_i(x), each exponent row shifted by one in slot i.
        let forward: Vec<(Rat, Vec<Rat>)> = (0..payoffs.term_count)
            .map(|t| {
                let mut row = payoffs.exponents[i][t].clone();
                row[i] += rat_int(1);
                (payoffs.coefficients[i][t].clone(), row)
            })
            .collect();
        reactions.push((rat_int(1), forward));

        // Backward: X_i · φ(x) = Σ_p X_i X_p f_p(x).
        let mut backward = Vec::with_capacity(m * payoffs.term_count);
        for p in 0..m {
            for t in 0..payoffs.term_count {
                let mut row = payoffs.exponents[p][t].clone();
                row[p] += rat_int(1);
                row[i] += rat_int(1);
                backward.push((payoffs.coefficients[p][t].clone(), row));
            }
        }
        reactions.push((rat_int(1), backward));
    }
    Ok(PolyPlKinetics::new(m, reactions)?.canonical())
}

/// Why the off-diagonal exponent condition fails at a (term, species) slot.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionViolation {
    /// The off-diagonal exponents disagree among themselves.
    NotSingleton { values: Vec<Rat> },
    /// The shared off-diagonal exponent equals the diagonal one.
    EqualsDiagonal { value: Rat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionFailure {
    /// Term index (0-based).
    pub term: usize,
    /// Species index (0-based).
    pub species: usize,
    pub violation: ConditionViolation,
}

/// Outcome of the off-diagonal exponent check, with one entry per failing
/// (term, species) slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    /// With a single species there are no off-diagonal slots to check; the
    /// condition holds vacuously and this flag records that.
    pub vacuous: bool,
    pub failures: Vec<ConditionFailure>,
}

/// Checks that for every term `t` and species `j` the off-diagonal exponents
/// `{g^p_{tj} : p ≠ j}` form a singleton different from the diagonal
/// exponent `g^j_{tj}`.
pub fn check_condition(payoffs: &PayoffSystem) -> ConditionReport {
    let m = payoffs.species.len();
    let mut failures = Vec::new();
    for t in 0..payoffs.term_count {
        for j in 0..m {
            let off: Vec<&Rat> = (0..m)
                .filter(|&p| p != j)
                .map(|p| &payoffs.exponents[p][t][j])
                .collect();
            let Some(first) = off.first() else {
                continue; // m = 1: nothing to compare
            };
            if off.iter().any(|g| g != first) {
                let mut values: Vec<Rat> = off.iter().map(|g| (*g).clone()).collect();
                values.dedup();
                failures.push(ConditionFailure {
                    term: t,
                    species: j,
                    violation: ConditionViolation::NotSingleton { values },
                });
            } else if **first == payoffs.exponents[j][t][j] {
                failures.push(ConditionFailure {
                    term: t,
                    species: j,
                    violation: ConditionViolation::EqualsDiagonal {
                        value: (*first).clone(),
                    },
                });
            }
        }
    }
    ConditionReport {
        holds: failures.is_empty(),
        vacuous: m == 1,
        failures,
    }
}

/// Per-summand facts recomputed by [`uniqueness_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummandReport {
    pub index: usize,
    pub t_rank_maximal: bool,
    pub kinetic_order_dim: usize,
    pub kinetic_deficiency: usize,
}

/// The full chain of facts certifying a unique positive equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub condition: ConditionReport,
    pub structural: StructuralReport,
    pub summands: Vec<SummandReport>,
    /// Dimension of the parameter subspace `S̃^⊥` of the first summand.
    pub parameter_dim: usize,
    pub robustness: RobustnessReport,
    /// True when every recomputed link holds: each summand `T̂`-rank
    /// maximal with zero kinetic deficiency, the network weakly reversible,
    /// and the parameter subspace zero-dimensional.
    pub unique_positive_equilibrium: bool,
}

/// Builds the replicator system, verifies the exponent condition, and then
/// recomputes every step of the uniqueness chain: summand `T̂`-rank
/// maximality, kinetic order dimensions, kinetic deficiencies, the parameter
/// subspace, and the robust species set.
pub fn uniqueness_report(payoffs: &PayoffSystem) -> Result<UniquenessReport, ReplicatorError> {
    let condition = check_condition(payoffs);
    if !condition.holds {
        return Err(ReplicatorError::ConditionFailed(condition));
    }

    let net = build_replicator_network(&payoffs.species)?;
    let structural = net.structural_report();
    let kinetics = replicator_kinetics(payoffs)?;
    let summand_kinetics: Vec<PowerLawKinetics> = kinetics.pl_summands()?;

    let mut summands = Vec::with_capacity(summand_kinetics.len());
    let mut flux = None;
    for (index, summand) in summand_kinetics.iter().enumerate() {
        let t_rank_maximal = is_pl_tik(&net, summand)?;
        let subspace = kinetic_order_subspace(&net, summand)?;
        let deficiency = kinetic_deficiency(&net, summand)?;
        if flux.is_none() {
            flux = Some(subspace.clone());
        }
        summands.push(SummandReport {
            index,
            t_rank_maximal,
            kinetic_order_dim: subspace.dim(),
            kinetic_deficiency: deficiency,
        });
    }
    let flux = flux.expect("at least one summand");
    let parameter_dim = flux.orthogonal_complement().dim();
    let robustness = robust_species(&flux, RobustKind::Acr);

    let unique = structural.weakly_reversible
        && parameter_dim == 0
        && summands
            .iter()
            .all(|s| s.t_rank_maximal && s.kinetic_deficiency == 0);

    Ok(UniquenessReport {
        condition,
        structural,
        summands,
        parameter_dim,
        robustness,
        unique_positive_equilibrium: unique,
    })
}

/// The replicator vector field `x_i (f_i(x) − φ(x))` evaluated directly from
/// the payoffs; the network representation must reproduce it.
pub fn replicator_vector_field(payoffs: &PayoffSystem, x: &[f64]) -> Vec<f64> {
    let values = payoffs.payoff_values(x);
    let average: f64 = values.iter().zip(x).map(|(f, &xv)| xv * f).sum();
    x.iter()
        .zip(&values)
        .map(|(&xv, f)| xv * (f - average))
        .collect()
}
