//! Power-law and poly-power-law kinetics.
//!
//! A power-law kinetics assigns each reaction a rate `k_i · Π_j x_j^{f_ij}`;
//! the rows `f_i` form the kinetic order matrix. When branching reactions
//! (reactions sharing a reactant complex) carry identical rows, the kinetics
//! is reactant-determined and each reactant complex has a well-defined
//! *kinetic complex*: its kinetic order row viewed as a point of species
//! space. From those we build the T-matrix, the rank test for
//! `T̂`-maximality, the kinetic order subspace `S̃`, the kinetic reactant
//! flux subspace, and the kinetic deficiency `δ̃ = n − ℓ − dim S̃`.
//!
//! Poly-power-law kinetics are per-reaction sums of power-law monomials.
//! They normalize to a canonical representation in which every reaction has
//! the same number of terms, and then split into power-law summands whose
//! pointwise sum reproduces the original rates exactly.

use crate::linalg::{rank, Matrix, SubspaceBasis};
use crate::network::Network;
use crate::rational::{rat_to_f64, Rat};
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KineticsError {
    #[error("kinetic order matrix is {got_rows}x{got_cols}, expected {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("rate vector has length {got}, expected {expected}")]
    RateLengthMismatch { expected: usize, got: usize },
    #[error("rate constant for reaction {0} is not strictly positive")]
    NonPositiveRate(usize),
    #[error("kinetics is not reactant-determined: reactions {0} and {1} share a reactant complex but have different kinetic order rows")]
    NotReactantDetermined(usize, usize),
    #[error("network is not cycle terminal: complex {0} is never a reactant, so its kinetic complex is undefined")]
    NotCycleTerminal(usize),
    #[error("rate constants are required for this operation")]
    MissingRates,
    #[error("evaluation point must be strictly positive")]
    NonPositivePoint,
    #[error("evaluation point has length {got}, expected {expected}")]
    PointLengthMismatch { expected: usize, got: usize },
    #[error("reaction {0} has no terms")]
    EmptyTerms(usize),
    #[error("reaction {reaction} term {term} has a negative coefficient")]
    NegativeTermCoefficient { reaction: usize, term: usize },
    #[error("poly kinetics is not in canonical form: reaction {0} has {1} terms, reaction {2} has {3}")]
    NotCanonical(usize, usize, usize, usize),
}

/// Power-law kinetics: an `r × m` kinetic order matrix plus optional strictly
/// positive rate constants. Subspace-level analysis never needs the rates;
/// pointwise evaluation does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerLawKinetics {
    orders: Matrix,
    rates: Option<Vec<Rat>>,
}

impl PowerLawKinetics {
    pub fn new(orders: Matrix, rates: Option<Vec<Rat>>) -> Result<Self, KineticsError> {
        if let Some(rates) = &rates {
            if rates.len() != orders.rows() {
                return Err(KineticsError::RateLengthMismatch {
                    expected: orders.rows(),
                    got: rates.len(),
                });
            }
            if let Some(bad) = rates.iter().position(|k| !k.is_positive()) {
                return Err(KineticsError::NonPositiveRate(bad));
            }
        }
        Ok(PowerLawKinetics { orders, rates })
    }

    /// Mass action: kinetic orders are the reactant stoichiometric
    /// coefficients.
    pub fn mass_action(net: &Network) -> Self {
        let m = net.species_count();
        let rows = net
            .reactions()
            .iter()
            .map(|rxn| net.complexes()[rxn.reactant].to_vector(m))
            .collect();
        PowerLawKinetics {
            orders: Matrix::from_rows(m, rows),
            rates: None,
        }
    }

    pub fn with_rates(mut self, rates: Vec<Rat>) -> Result<Self, KineticsError> {
        if rates.len() != self.orders.rows() {
            return Err(KineticsError::RateLengthMismatch {
                expected: self.orders.rows(),
                got: rates.len(),
            });
        }
        if let Some(bad) = rates.iter().position(|k| !k.is_positive()) {
            return Err(KineticsError::NonPositiveRate(bad));
        }
        self.rates = Some(rates);
        Ok(self)
    }

    pub fn orders(&self) -> &Matrix {
        &self.orders
    }

    pub fn order_row(&self, reaction: usize) -> &[Rat] {
        self.orders.row(reaction)
    }

    pub fn rates(&self) -> Option<&[Rat]> {
        self.rates.as_deref()
    }

    pub fn reaction_count(&self) -> usize {
        self.orders.rows()
    }

    fn check_dims(&self, net: &Network) -> Result<(), KineticsError> {
        if self.orders.rows() != net.reaction_count() || self.orders.cols() != net.species_count()
        {
            return Err(KineticsError::DimensionMismatch {
                rows: net.reaction_count(),
                cols: net.species_count(),
                got_rows: self.orders.rows(),
                got_cols: self.orders.cols(),
            });
        }
        Ok(())
    }

    /// Rate vector at a strictly positive point (requires rate constants).
    pub fn rate_values(&self, x: &[f64]) -> Result<Vec<f64>, KineticsError> {
        let rates = self.rates.as_ref().ok_or(KineticsError::MissingRates)?;
        if x.len() != self.orders.cols() {
            return Err(KineticsError::PointLengthMismatch {
                expected: self.orders.cols(),
                got: x.len(),
            });
        }
        if x.iter().any(|&v| v <= 0.0) {
            return Err(KineticsError::NonPositivePoint);
        }
        Ok((0..self.orders.rows())
            .map(|i| {
                let mono: f64 = self
                    .order_row(i)
                    .iter()
                    .zip(x)
                    .map(|(f, &xv)| xv.powf(rat_to_f64(f)))
                    .product();
                rat_to_f64(&rates[i]) * mono
            })
            .collect())
    }
}

/// Whether branching reactions share kinetic order rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KineticOrderClass {
    /// PL-RDK: all reactions with a common reactant complex have identical rows.
    ReactantDetermined,
    /// PL-NDK: some reactant complex branches with different rows.
    NonReactantDetermined,
}

/// Classifies a power-law kinetics as reactant-determined or not.
pub fn classify(net: &Network, kin: &PowerLawKinetics) -> Result<KineticOrderClass, KineticsError> {
    kin.check_dims(net)?;
    let r = net.reaction_count();
    for i in 0..r {
        for j in i + 1..r {
            if net.reactions()[i].reactant == net.reactions()[j].reactant
                && kin.order_row(i) != kin.order_row(j)
            {
                return Ok(KineticOrderClass::NonReactantDetermined);
            }
        }
    }
    Ok(KineticOrderClass::ReactantDetermined)
}

/// Kinetic complexes of every reactant complex: entry `v` is the shared
/// kinetic order row of the reactions with reactant `v`, or `None` when `v`
/// is never a reactant. Errors on non-reactant-determined kinetics.
pub fn kinetic_complexes(
    net: &Network,
    kin: &PowerLawKinetics,
) -> Result<Vec<Option<Vec<Rat>>>, KineticsError> {
    kin.check_dims(net)?;
    let mut map: Vec<Option<(usize, Vec<Rat>)>> = vec![None; net.complex_count()];
    for (i, rxn) in net.reactions().iter().enumerate() {
        let row = kin.order_row(i).to_vec();
        match &map[rxn.reactant] {
            Some((first, existing)) if *existing != row => {
                return Err(KineticsError::NotReactantDetermined(*first, i));
            }
            Some(_) => {}
            None => map[rxn.reactant] = Some((i, row)),
        }
    }
    Ok(map.into_iter().map(|e| e.map(|(_, row)| row)).collect())
}

/// Columns of kinetic complexes, one per reactant complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMatrix {
    /// Complex indices of the columns, ascending.
    pub reactant_complexes: Vec<usize>,
    /// `m × n_r`: column `c` is the kinetic complex of `reactant_complexes[c]`.
    pub columns: Matrix,
}

impl TMatrix {
    /// Appends one row per linkage class (the characteristic vector of the
    /// class over the reactant-complex columns), giving the `(m+ℓ) × n_r`
    /// augmented matrix whose column rank decides `T̂`-maximality.
    pub fn augmented(&self, net: &Network) -> Matrix {
        let class_of = net.linkage_class_of_complexes();
        let num_classes = net.linkage_classes().len();
        let m = self.columns.rows();
        let n_r = self.columns.cols();
        let mut out = Matrix::zeros(m + num_classes, n_r);
        for r in 0..m {
            for c in 0..n_r {
                out[(r, c)] = self.columns[(r, c)].clone();
            }
        }
        for (c, &complex) in self.reactant_complexes.iter().enumerate() {
            out[(m + class_of[complex], c)] = Rat::one();
        }
        out
    }
}

/// Builds the T-matrix of a reactant-determined kinetics.
pub fn t_matrix(net: &Network, kin: &PowerLawKinetics) -> Result<TMatrix, KineticsError> {
    let complexes = kinetic_complexes(net, kin)?;
    let m = net.species_count();
    let mut reactants = Vec::new();
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for (idx, entry) in complexes.iter().enumerate() {
        if let Some(row) = entry {
            reactants.push(idx);
            cols.push(row.clone());
        }
    }
    let mut columns = Matrix::zeros(m, cols.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, value) in col.iter().enumerate() {
            columns[(r, c)] = value.clone();
        }
    }
    Ok(TMatrix {
        reactant_complexes: reactants,
        columns,
    })
}

/// True when the augmented T-matrix has maximal column rank (one column per
/// reactant complex).
pub fn is_pl_tik(net: &Network, kin: &PowerLawKinetics) -> Result<bool, KineticsError> {
    let t = t_matrix(net, kin)?;
    let augmented = t.augmented(net);
    Ok(rank(&augmented) == augmented.cols())
}

/// Kinetic order subspace `S̃`: span of the kinetic-complex differences over
/// all reactions. Defined for reactant-determined kinetics on cycle-terminal
/// networks, where every complex has a kinetic complex.
pub fn kinetic_order_subspace(
    net: &Network,
    kin: &PowerLawKinetics,
) -> Result<SubspaceBasis, KineticsError> {
    let complexes = kinetic_complexes(net, kin)?;
    if let Some(missing) = complexes.iter().position(Option::is_none) {
        return Err(KineticsError::NotCycleTerminal(missing));
    }
    let m = net.species_count();
    let rows = net
        .reactions()
        .iter()
        .map(|rxn| {
            let target = complexes[rxn.product].as_ref().unwrap();
            let source = complexes[rxn.reactant].as_ref().unwrap();
            target.iter().zip(source).map(|(t, s)| t - s).collect()
        })
        .collect();
    Ok(SubspaceBasis::from_rows(m, rows))
}

/// Kinetic reactant flux subspace `S̃_R`: the kinetic-complex differences of
/// the maximal cycle-terminal subnetwork, i.e. of the reactions whose product
/// is itself a reactant complex. Coincides with `S̃` on cycle-terminal
/// networks.
pub fn kinetic_reactant_flux_subspace(
    net: &Network,
    kin: &PowerLawKinetics,
) -> Result<SubspaceBasis, KineticsError> {
    let complexes = kinetic_complexes(net, kin)?;
    let m = net.species_count();
    let rows = net
        .reactions()
        .iter()
        .filter_map(|rxn| {
            let target = complexes[rxn.product].as_ref()?;
            let source = complexes[rxn.reactant].as_ref()?;
            Some(target.iter().zip(source).map(|(t, s)| t - s).collect())
        })
        .collect();
    Ok(SubspaceBasis::from_rows(m, rows))
}

/// Kinetic deficiency `δ̃ = n − ℓ − dim S̃`. Zero for a weakly reversible
/// system means complex balancing holds for every choice of rate constants.
pub fn kinetic_deficiency(net: &Network, kin: &PowerLawKinetics) -> Result<usize, KineticsError> {
    let subspace = kinetic_order_subspace(net, kin)?;
    let n = net.complex_count();
    let linkage = net.linkage_classes().len();
    assert!(
        n >= linkage + subspace.dim(),
        "kinetic deficiency must be nonnegative"
    );
    Ok(n - linkage - subspace.dim())
}

/// A pair of reactions whose kinetic order rows differ in exactly one
/// species coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfPair {
    pub reactions: (usize, usize),
    pub species: usize,
    /// Both reactions lie in the same linkage class.
    pub same_linkage_class: bool,
    /// Both reactant complexes are nonterminal.
    pub reactants_nonterminal: bool,
}

/// All Shinar-Feinberg pairs of the kinetics, with linkage-class and
/// terminality annotations. Comparison is exact; no tolerance.
pub fn sf_pairs(net: &Network, kin: &PowerLawKinetics) -> Result<Vec<SfPair>, KineticsError> {
    kin.check_dims(net)?;
    let linkage_of = net.linkage_class_of_reactions();
    let terminal = net.terminal_complexes();
    let r = net.reaction_count();
    let mut pairs = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let diffs: Vec<usize> = kin
                .order_row(i)
                .iter()
                .zip(kin.order_row(j))
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(idx, _)| idx)
                .collect();
            if let [species] = diffs[..] {
                debug_assert!(kin.order_row(i)[species] != kin.order_row(j)[species]);
                pairs.push(SfPair {
                    reactions: (i, j),
                    species,
                    same_linkage_class: linkage_of[i] == linkage_of[j],
                    reactants_nonterminal: !terminal[net.reactions()[i].reactant]
                        && !terminal[net.reactions()[j].reactant],
                });
            }
        }
    }
    Ok(pairs)
}

/// One monomial of a poly-power-law rate: `coeff · x^exponents`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTerm {
    pub coeff: Rat,
    pub exponents: Vec<Rat>,
}

/// Constructor input for one poly-power-law reaction: the rate constant and
/// the raw `(coefficient, exponent row)` terms.
pub type PolyRateSpec = (Rat, Vec<(Rat, Vec<Rat>)>);

/// Poly-power-law kinetics: per reaction a rate constant `k_i > 0` and a
/// lexicographically ordered list of monomials with nonnegative coefficients.
/// Zero-coefficient monomials are dropped and equal exponent rows merged at
/// construction, which changes no rate value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyPlKinetics {
    species_count: usize,
    reactions: Vec<PolyRate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRate {
    pub rate: Rat,
    pub terms: Vec<PolyTerm>,
}

impl PolyPlKinetics {
    /// Validates coefficients and dimensions, merges duplicate exponent rows,
    /// sorts terms lexicographically by exponent row.
    pub fn new(
        species_count: usize,
        reactions: Vec<PolyRateSpec>,
    ) -> Result<Self, KineticsError> {
        let mut out = Vec::with_capacity(reactions.len());
        for (i, (rate, raw_terms)) in reactions.into_iter().enumerate() {
            if !rate.is_positive() {
                return Err(KineticsError::NonPositiveRate(i));
            }
            let mut merged: Vec<PolyTerm> = Vec::new();
            for (t, (coeff, exponents)) in raw_terms.into_iter().enumerate() {
                if exponents.len() != species_count {
                    return Err(KineticsError::DimensionMismatch {
                        rows: 0,
                        cols: species_count,
                        got_rows: 0,
                        got_cols: exponents.len(),
                    });
                }
                if coeff.is_negative() {
                    return Err(KineticsError::NegativeTermCoefficient {
                        reaction: i,
                        term: t,
                    });
                }
                if coeff.is_zero() {
                    continue;
                }
                match merged.iter_mut().find(|m| m.exponents == exponents) {
                    Some(existing) => existing.coeff += coeff,
                    None => merged.push(PolyTerm { coeff, exponents }),
                }
            }
            if merged.is_empty() {
                return Err(KineticsError::EmptyTerms(i));
            }
            merged.sort_by(|a, b| a.exponents.cmp(&b.exponents));
            out.push(PolyRate {
                rate,
                terms: merged,
            });
        }
        Ok(PolyPlKinetics {
            species_count,
            reactions: out,
        })
    }

    pub fn species_count(&self) -> usize {
        self.species_count
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    pub fn reactions(&self) -> &[PolyRate] {
        &self.reactions
    }

    pub fn max_terms(&self) -> usize {
        self.reactions.iter().map(|r| r.terms.len()).max().unwrap_or(0)
    }

    /// True when every reaction has the same number of terms.
    pub fn is_canonical(&self) -> bool {
        let h = self.max_terms();
        self.reactions.iter().all(|r| r.terms.len() == h)
    }

    /// Canonical representation: every reaction padded to `h = max_i h_i`
    /// terms by splitting its last term into `h − h_i + 1` equal-weight
    /// copies. Rate values are unchanged at every point.
    pub fn canonical(&self) -> PolyPlKinetics {
        let h = self.max_terms();
        let reactions = self
            .reactions
            .iter()
            .map(|r| {
                let h_i = r.terms.len();
                if h_i == h {
                    return r.clone();
                }
                let copies = h - h_i + 1;
                let mut terms = r.terms[..h_i - 1].to_vec();
                let last = &r.terms[h_i - 1];
                let share = &last.coeff / crate::rational::rat_int(copies as i64);
                for _ in 0..copies {
                    terms.push(PolyTerm {
                        coeff: share.clone(),
                        exponents: last.exponents.clone(),
                    });
                }
                PolyRate {
                    rate: r.rate.clone(),
                    terms,
                }
            })
            .collect();
        PolyPlKinetics {
            species_count: self.species_count,
            reactions,
        }
    }

    /// Splits a canonical poly kinetics into `h` power-law summands: summand
    /// `j` takes the `j`-th term of every reaction, with rate `k_i · a_ij`.
    /// Their pointwise sum reproduces the poly rates exactly.
    pub fn pl_summands(&self) -> Result<Vec<PowerLawKinetics>, KineticsError> {
        let h = self.max_terms();
        if let Some(bad) = self.reactions.iter().position(|r| r.terms.len() != h) {
            let first_full = self
                .reactions
                .iter()
                .position(|r| r.terms.len() == h)
                .unwrap_or(0);
            return Err(KineticsError::NotCanonical(
                bad,
                self.reactions[bad].terms.len(),
                first_full,
                h,
            ));
        }
        (0..h)
            .map(|j| {
                let rows = self
                    .reactions
                    .iter()
                    .map(|r| r.terms[j].exponents.clone())
                    .collect();
                let rates = self
                    .reactions
                    .iter()
                    .map(|r| &r.rate * &r.terms[j].coeff)
                    .collect();
                PowerLawKinetics::new(Matrix::from_rows(self.species_count, rows), Some(rates))
            })
            .collect()
    }

    /// Rate vector at a strictly positive point.
    pub fn rate_values(&self, x: &[f64]) -> Result<Vec<f64>, KineticsError> {
        if x.len() != self.species_count {
            return Err(KineticsError::PointLengthMismatch {
                expected: self.species_count,
                got: x.len(),
            });
        }
        if x.iter().any(|&v| v <= 0.0) {
            return Err(KineticsError::NonPositivePoint);
        }
        Ok(self
            .reactions
            .iter()
            .map(|r| {
                let sum: f64 = r
                    .terms
                    .iter()
                    .map(|t| {
                        let mono: f64 = t
                            .exponents
                            .iter()
                            .zip(x)
                            .map(|(f, &xv)| xv.powf(rat_to_f64(f)))
                            .product();
                        rat_to_f64(&t.coeff) * mono
                    })
                    .sum();
                rat_to_f64(&r.rate) * sum
            })
            .collect())
    }

    /// Exact rate vector at a positive rational point, available when every
    /// exponent is an integer (rational powers of rationals are generally
    /// irrational). Returns `None` otherwise.
    pub fn rate_values_exact(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        if x.len() != self.species_count || !x.iter().all(|v| v.is_positive()) {
            return None;
        }
        self.reactions
            .iter()
            .map(|r| {
                let mut sum = Rat::zero();
                for t in &r.terms {
                    let mut mono = t.coeff.clone();
                    for (f, xv) in t.exponents.iter().zip(x) {
                        if !f.denom().is_one() {
                            return None;
                        }
                        let e = f.numer().to_i32()?;
                        mono *= rational_pow(xv, e);
                    }
                    sum += mono;
                }
                Some(&r.rate * sum)
            })
            .collect()
    }
}

fn rational_pow(x: &Rat, e: i32) -> Rat {
    if e >= 0 {
        num::pow::pow(x.clone(), e as usize)
    } else {
        Rat::one() / num::pow::pow(x.clone(), (-e) as usize)
    }
}

/// Either flavor of kinetics, for operations that accept both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kinetics {
    PowerLaw(PowerLawKinetics),
    PolyPl(PolyPlKinetics),
}

impl Kinetics {
    pub fn rate_values(&self, x: &[f64]) -> Result<Vec<f64>, KineticsError> {
        match self {
            Kinetics::PowerLaw(k) => k.rate_values(x),
            Kinetics::PolyPl(k) => k.rate_values(x),
        }
    }

    pub fn reaction_count(&self) -> usize {
        match self {
            Kinetics::PowerLaw(k) => k.reaction_count(),
            Kinetics::PolyPl(k) => k.reaction_count(),
        }
    }
}

/// Species formation rate `N · K(x)` in floating point.
pub fn evaluate_sfrf(net: &Network, kin: &Kinetics, x: &[f64]) -> Result<Vec<f64>, KineticsError> {
    let rates = kin.rate_values(x)?;
    let m = net.species_count();
    let mut out = vec![0.0; m];
    for (j, rxn) in net.reactions().iter().enumerate() {
        for (s, c) in net.complexes()[rxn.product].iter() {
            out[*s] += rat_to_f64(c) * rates[j];
        }
        for (s, c) in net.complexes()[rxn.reactant].iter() {
            out[*s] -= rat_to_f64(c) * rates[j];
        }
    }
    Ok(out)
}

/// Complex formation rate `I_a · K(x)`: one value per complex; the zero
/// vector (within tolerance) characterizes a complex balanced point.
pub fn evaluate_complex_formation(
    net: &Network,
    kin: &Kinetics,
    x: &[f64],
) -> Result<Vec<f64>, KineticsError> {
    let rates = kin.rate_values(x)?;
    let mut out = vec![0.0; net.complex_count()];
    for (j, rxn) in net.reactions().iter().enumerate() {
        out[rxn.product] += rates[j];
        out[rxn.reactant] -= rates[j];
    }
    Ok(out)
}

/// Default absolute tolerance for calling a floating-point residual "zero".
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Damped Newton search for a strictly positive root of the species
/// formation rate, run in log coordinates so iterates stay positive.
/// Returns `None` on divergence or when the residual fails to reach
/// `1e-12` within 200 iterations.
pub fn newton_equilibrium(net: &Network, kin: &Kinetics, start: &[f64]) -> Option<Vec<f64>> {
    const MAX_ITER: usize = 200;
    const TOL: f64 = 1e-12;
    const LOG_BOUND: f64 = 30.0;

    let m = net.species_count();
    if start.len() != m || start.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let mut u: Vec<f64> = start.iter().map(|v| v.ln()).collect();
    let g = |u: &[f64]| -> Option<Vec<f64>> {
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        evaluate_sfrf(net, kin, &x).ok()
    };
    let norm_inf = |v: &[f64]| v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    let mut residual = g(&u)?;
    for _ in 0..MAX_ITER {
        if norm_inf(&residual) < TOL {
            return Some(u.iter().map(|v| v.exp()).collect());
        }
        if norm_inf(&u) > LOG_BOUND {
            return None;
        }
        // Numeric Jacobian by central differences in log coordinates.
        let mut jac = vec![vec![0.0; m]; m];
        for j in 0..m {
            let h = 1e-6;
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let gp = g(&up)?;
            let gn = g(&dn)?;
            for i in 0..m {
                jac[i][j] = (gp[i] - gn[i]) / (2.0 * h);
            }
        }
        let rhs: Vec<f64> = residual.iter().map(|v| -v).collect();
        let step = crate::numeric::solve_dense(jac, rhs)?;

        // Backtracking on the residual norm.
        let base = norm_inf(&residual);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let candidate: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + alpha * d).collect();
            if let Some(res) = g(&candidate) {
                if norm_inf(&res) < base {
                    accepted = Some((candidate, res));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let (next_u, next_res) = accepted?;
        u = next_u;
        residual = next_res;
    }
    None
}
