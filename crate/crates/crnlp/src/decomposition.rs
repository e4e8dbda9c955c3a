//! Decompositions of a network into reaction-disjoint subnetworks, the
//! independence tests that make robustness findings transfer to the whole
//! network, and the building-blocks frameworks.
//!
//! A decomposition partitions the reaction set. It is *independent* when the
//! block stoichiometric subspaces sum directly (ranks add up), and *incidence
//! independent* when the block incidence images do, which reduces to
//! `Σ (n_i − ℓ_i) = n − ℓ`. Independence lets ACR findings on a block lift to
//! the parent network; incidence independence does the same for BCR.
//!
//! The building-blocks scan looks for subnetworks that force robustness in a
//! species through a Shinar-Feinberg pair:
//!
//! 1. deficiency-zero weakly reversible reactant-determined blocks with the
//!    pair inside one linkage class,
//! 2. deficiency-one reactant-determined blocks whose pair has nonterminal
//!    reactant complexes, and
//! 3. cycle-terminal reactant-determined blocks with the pair in a linkage
//!    class whose equilibria set is log-parametrized with flux subspace `S̃_i`
//!    (certified automatically by zero kinetic deficiency plus weak
//!    reversibility, structurally by the `T̂`-rank test at low deficiency, or
//!    accepted as a caller assertion).
//!
//! Case 1 insists on the pair sharing a linkage class; a pair that spans two
//! linkage classes of a deficiency-zero block licenses no conclusion.

use crate::kinetics::{
    evaluate_complex_formation, evaluate_sfrf, Kinetics, KineticsError, PowerLawKinetics,
    ZERO_TOLERANCE,
};
use crate::linalg::{rank, Matrix, SubspaceBasis};
use crate::network::{Complex, Network, NetworkError, StructuralReport};
use crate::rational::Rat;
use crate::robustness::{robust_species, RobustKind};
use num::{One, Signed};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("block `{0}` is empty")]
    EmptyBlock(String),
    #[error("reaction {reaction} appears in blocks `{first}` and `{second}`")]
    OverlappingBlocks {
        reaction: usize,
        first: String,
        second: String,
    },
    #[error("reactions {0:?} are not covered by any block")]
    MissingReactions(Vec<usize>),
    #[error("block `{block}` references reaction index {index}, but the network has {count}")]
    ReactionOutOfRange {
        block: String,
        index: usize,
        count: usize,
    },
    #[error("decomposition is not independent (block ranks do not add up)")]
    NotIndependent,
    #[error("decomposition is not incidence independent")]
    NotIncidenceIndependent,
    #[error("robustness propagation is only defined for ACR and BCR")]
    UnsupportedKind,
    #[error("species {species} is reported robust in block {block} but does not occur there")]
    RobustSpeciesOutsideBlock { block: usize, species: usize },
    #[error("equilibrium witness has residual {residual:.3e}, beyond tolerance {tolerance:.3e}")]
    WitnessRejected { residual: f64, tolerance: f64 },
    #[error("block `{block}` kinetic complex has a negative coordinate; it is not a stoichiometric complex")]
    NegativeKineticComplex { block: String },
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A validated partition of the reaction set, with derived subnetworks.
#[derive(Debug, Clone)]
pub struct Decomposition {
    blocks: Vec<Block>,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub name: String,
    /// Parent reaction indices, ascending.
    pub reactions: Vec<usize>,
    /// Restriction of the parent network to those reactions.
    pub subnetwork: Network,
}

impl Decomposition {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// Validates that the named blocks partition the reaction set and derives the
/// subnetworks.
pub fn build_decomposition(
    net: &Network,
    named_blocks: Vec<(String, Vec<usize>)>,
) -> Result<Decomposition, DecompositionError> {
    let r = net.reaction_count();
    let mut owner: Vec<Option<usize>> = vec![None; r];
    for (b, (name, reactions)) in named_blocks.iter().enumerate() {
        if reactions.is_empty() {
            return Err(DecompositionError::EmptyBlock(name.clone()));
        }
        for &idx in reactions {
            if idx >= r {
                return Err(DecompositionError::ReactionOutOfRange {
                    block: name.clone(),
                    index: idx,
                    count: r,
                });
            }
            if let Some(first) = owner[idx] {
                return Err(DecompositionError::OverlappingBlocks {
                    reaction: idx,
                    first: named_blocks[first].0.clone(),
                    second: name.clone(),
                });
            }
            owner[idx] = Some(b);
        }
    }
    let missing: Vec<usize> = owner
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_none())
        .map(|(i, _)| i)
        .collect();
    if !missing.is_empty() {
        return Err(DecompositionError::MissingReactions(missing));
    }

    let blocks = named_blocks
        .into_iter()
        .map(|(name, mut reactions)| {
            reactions.sort_unstable();
            let subnetwork = net.subnetwork(&reactions)?;
            Ok(Block {
                name,
                reactions,
                subnetwork,
            })
        })
        .collect::<Result<Vec<_>, DecompositionError>>()?;
    Ok(Decomposition { blocks })
}

/// Block stoichiometric subspaces, embedded in the parent species space.
pub fn block_stoichiometric_subspaces(net: &Network, d: &Decomposition) -> Vec<SubspaceBasis> {
    d.blocks
        .iter()
        .map(|b| net.stoichiometric_subspace_of(&b.reactions))
        .collect()
}

/// True when the block stoichiometric subspaces sum directly, i.e. block
/// ranks add up to the network rank.
pub fn is_independent(net: &Network, d: &Decomposition) -> bool {
    let subspaces = block_stoichiometric_subspaces(net, d);
    let refs: Vec<&SubspaceBasis> = subspaces.iter().collect();
    SubspaceBasis::is_direct_sum(&refs).expect("shared ambient dimension by construction")
}

/// True when the block incidence images sum directly:
/// `Σ (n_i − ℓ_i) = n − ℓ`.
pub fn is_incidence_independent(net: &Network, d: &Decomposition) -> bool {
    let parent = net.complex_count() - net.linkage_classes().len();
    let blocks: usize = d
        .blocks
        .iter()
        .map(|b| b.subnetwork.complex_count() - b.subnetwork.linkage_classes().len())
        .sum();
    blocks == parent
}

/// Per-block view of a power-law kinetics, everything expressed in parent
/// species coordinates so subspaces from different blocks can be combined.
#[derive(Debug, Clone)]
pub struct BlockKinetics {
    /// Parent complex index → kinetic complex, for the block's reactant
    /// complexes.
    kinetic_complexes: BTreeMap<usize, Vec<Rat>>,
    /// Parent complex indices used by the block.
    complexes: Vec<usize>,
    reactant_determined: bool,
    cycle_terminal: bool,
}

impl BlockKinetics {
    fn analyze(net: &Network, kin: &PowerLawKinetics, reactions: &[usize]) -> Self {
        let mut kinetic_complexes: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
        let mut reactant_determined = true;
        let mut complexes = BTreeSet::new();
        for &idx in reactions {
            let rxn = &net.reactions()[idx];
            complexes.insert(rxn.reactant);
            complexes.insert(rxn.product);
            let row = kin.order_row(idx).to_vec();
            match kinetic_complexes.get(&rxn.reactant) {
                Some(existing) if *existing != row => reactant_determined = false,
                Some(_) => {}
                None => {
                    kinetic_complexes.insert(rxn.reactant, row);
                }
            }
        }
        let cycle_terminal = complexes
            .iter()
            .all(|c| kinetic_complexes.contains_key(c));
        BlockKinetics {
            kinetic_complexes,
            complexes: complexes.into_iter().collect(),
            reactant_determined,
            cycle_terminal,
        }
    }

    pub fn is_reactant_determined(&self) -> bool {
        self.reactant_determined
    }

    pub fn is_cycle_terminal(&self) -> bool {
        self.cycle_terminal
    }
}

/// Kinetic order subspace of one block in parent coordinates. Requires the
/// block to be reactant-determined and cycle terminal.
pub fn block_kinetic_order_subspace(
    net: &Network,
    kin: &PowerLawKinetics,
    reactions: &[usize],
) -> Result<SubspaceBasis, DecompositionError> {
    let view = BlockKinetics::analyze(net, kin, reactions);
    if !view.reactant_determined {
        let (a, b) = first_branching_conflict(net, kin, reactions);
        return Err(KineticsError::NotReactantDetermined(a, b).into());
    }
    if !view.cycle_terminal {
        let missing = view
            .complexes
            .iter()
            .find(|c| !view.kinetic_complexes.contains_key(c))
            .copied()
            .unwrap_or(0);
        return Err(KineticsError::NotCycleTerminal(missing).into());
    }
    let m = net.species_count();
    let rows = reactions
        .iter()
        .map(|&idx| {
            let rxn = &net.reactions()[idx];
            let target = &view.kinetic_complexes[&rxn.product];
            let source = &view.kinetic_complexes[&rxn.reactant];
            target.iter().zip(source).map(|(t, s)| t - s).collect()
        })
        .collect();
    Ok(SubspaceBasis::from_rows(m, rows))
}

fn first_branching_conflict(
    net: &Network,
    kin: &PowerLawKinetics,
    reactions: &[usize],
) -> (usize, usize) {
    for (pos, &i) in reactions.iter().enumerate() {
        for &j in &reactions[pos + 1..] {
            if net.reactions()[i].reactant == net.reactions()[j].reactant
                && kin.order_row(i) != kin.order_row(j)
            {
                return (i, j);
            }
        }
    }
    unreachable!("caller observed a conflict")
}

/// Kinetic order subspaces of every block, in parent coordinates.
pub fn block_kinetic_subspaces(
    net: &Network,
    kin: &PowerLawKinetics,
    d: &Decomposition,
) -> Result<Vec<SubspaceBasis>, DecompositionError> {
    d.blocks
        .iter()
        .map(|b| block_kinetic_order_subspace(net, kin, &b.reactions))
        .collect()
}

/// The decomposition-induced kinetic flux subspace `Σ_i S̃_i`.
pub fn kinetic_flux_subspace(
    net: &Network,
    kin: &PowerLawKinetics,
    d: &Decomposition,
) -> Result<SubspaceBasis, DecompositionError> {
    let subspaces = block_kinetic_subspaces(net, kin, d)?;
    let refs: Vec<&SubspaceBasis> = subspaces.iter().collect();
    Ok(SubspaceBasis::sum(&refs).expect("shared ambient dimension"))
}

/// Builds the kinetic network induced by the decomposition: each block's
/// complexes are replaced by their kinetic complexes (per-block, so the same
/// parent complex may map to different vertices in different blocks) and the
/// arcs carry over. Fails when a kinetic complex has a negative coordinate,
/// since such a vertex is not a stoichiometric complex.
pub fn kinetic_network(
    net: &Network,
    kin: &PowerLawKinetics,
    d: &Decomposition,
) -> Result<Network, DecompositionError> {
    let mut reactions = Vec::new();
    for block in &d.blocks {
        let view = BlockKinetics::analyze(net, kin, &block.reactions);
        if !view.reactant_determined {
            let (a, b) = first_branching_conflict(net, kin, &block.reactions);
            return Err(KineticsError::NotReactantDetermined(a, b).into());
        }
        if !view.cycle_terminal {
            let missing = view
                .complexes
                .iter()
                .find(|c| !view.kinetic_complexes.contains_key(c))
                .copied()
                .unwrap_or(0);
            return Err(KineticsError::NotCycleTerminal(missing).into());
        }
        for &idx in &block.reactions {
            let rxn = &net.reactions()[idx];
            let vertex = |complex: usize| -> Result<Complex, DecompositionError> {
                let row = &view.kinetic_complexes[&complex];
                if row.iter().any(|v| v.is_negative()) {
                    return Err(DecompositionError::NegativeKineticComplex {
                        block: block.name.clone(),
                    });
                }
                Ok(Complex::new(
                    row.iter()
                        .enumerate()
                        .map(|(s, c)| (s, c.clone()))
                        .collect::<Vec<_>>(),
                )
                .expect("nonnegative coordinates"))
            };
            reactions.push((
                rxn.label.clone(),
                vertex(rxn.reactant)?,
                vertex(rxn.product)?,
            ));
        }
    }
    Ok(Network::new(net.species().to_vec(), reactions)?)
}

/// Lifts per-block robust species to the parent network.
///
/// ACR needs an independent decomposition, BCR an incidence independent one.
/// Every reported species must occur in its block; the union of the block
/// sets is a lower bound for the robust set of the whole network.
pub fn propagate_robustness(
    _net: &Network,
    d: &Decomposition,
    per_block: &[BTreeSet<usize>],
    kind: RobustKind,
) -> Result<BTreeSet<usize>, DecompositionError> {
    assert_eq!(per_block.len(), d.block_count(), "one species set per block");
    match kind {
        RobustKind::Acr => {
            if !is_independent(_net, d) {
                return Err(DecompositionError::NotIndependent);
            }
        }
        RobustKind::Bcr => {
            if !is_incidence_independent(_net, d) {
                return Err(DecompositionError::NotIncidenceIndependent);
            }
        }
        RobustKind::Generic => return Err(DecompositionError::UnsupportedKind),
    }
    let mut union = BTreeSet::new();
    for (b, (block, species_set)) in d.blocks.iter().zip(per_block).enumerate() {
        let block_species = block_species_indices(_net, block);
        for &species in species_set {
            if !block_species.contains(&species) {
                return Err(DecompositionError::RobustSpeciesOutsideBlock { block: b, species });
            }
            union.insert(species);
        }
    }
    Ok(union)
}

/// Parent species indices occurring in a block's complexes.
pub fn block_species_indices(net: &Network, block: &Block) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    for &idx in &block.reactions {
        let rxn = &net.reactions()[idx];
        set.extend(net.complexes()[rxn.reactant].species_indices());
        set.extend(net.complexes()[rxn.product].species_indices());
    }
    set
}

/// Whether the existence hypothesis comes as an assertion or a checked point.
#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumEvidence {
    Asserted,
    Witness(Vec<f64>),
}

/// Caller-supplied hypotheses for the building-blocks scan.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingBlockOptions {
    pub equilibrium: EquilibriumEvidence,
    /// Blocks the caller asserts to be LP systems with flux subspace `S̃_i`.
    pub lp_asserted_blocks: BTreeSet<usize>,
}

impl Default for BuildingBlockOptions {
    fn default() -> Self {
        BuildingBlockOptions {
            equilibrium: EquilibriumEvidence::Asserted,
            lp_asserted_blocks: BTreeSet::new(),
        }
    }
}

/// Which building-block case produced a finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockCase {
    /// Deficiency-zero weakly reversible block, pair inside one linkage class.
    DeficiencyZeroWeaklyReversible,
    /// Deficiency-one block with both pair reactants nonterminal.
    DeficiencyOneNonterminal,
    /// Cycle-terminal LP block with the pair inside one linkage class.
    CycleTerminalLp,
}

/// Evidence that a block's equilibria set is log-parametrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpCertification {
    /// Zero kinetic deficiency and weak reversibility.
    KineticDeficiencyZero,
    /// `T̂`-rank maximal kinetics on a t-minimal low-deficiency block with
    /// independent linkage classes.
    TikLowDeficiency,
    /// Accepted from the caller.
    UserAsserted,
}

/// One robustness conclusion: the named species is concentration robust in
/// the whole network, witnessed by an SF-pair inside the named block.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingBlockFinding {
    pub block: usize,
    pub species: usize,
    pub case: BlockCase,
    /// Parent reaction indices of the SF-pair.
    pub sf_pair: (usize, usize),
    pub block_deficiency: usize,
    pub certification: Option<LpCertification>,
}

/// Building-blocks scan concluding ACR; requires an independent
/// decomposition and a positive equilibrium (asserted or witnessed).
pub fn building_blocks_acr(
    net: &Network,
    kin: &PowerLawKinetics,
    d: &Decomposition,
    options: &BuildingBlockOptions,
) -> Result<Vec<BuildingBlockFinding>, DecompositionError> {
    if !is_independent(net, d) {
        return Err(DecompositionError::NotIndependent);
    }
    if let EquilibriumEvidence::Witness(x) = &options.equilibrium {
        let residual = evaluate_sfrf(net, &Kinetics::PowerLaw(kin.clone()), x)?
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        if residual > ZERO_TOLERANCE {
            return Err(DecompositionError::WitnessRejected {
                residual,
                tolerance: ZERO_TOLERANCE,
            });
        }
    }
    scan_blocks(net, kin, d, options)
}

/// Building-blocks scan concluding BCR; requires an incidence independent
/// decomposition and a complex balanced equilibrium (asserted or witnessed).
pub fn building_blocks_bcr(
    net: &Network,
    kin: &PowerLawKinetics,
    d: &Decomposition,
    options: &BuildingBlockOptions,
) -> Result<Vec<BuildingBlockFinding>, DecompositionError> {
    if !is_incidence_independent(net, d) {
        return Err(DecompositionError::NotIncidenceIndependent);
    }
    if let EquilibriumEvidence::Witness(x) = &options.equilibrium {
        let residual = evaluate_complex_formation(net, &Kinetics::PowerLaw(kin.clone()), x)?
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        if residual > ZERO_TOLERANCE {
            return Err(DecompositionError::WitnessRejected {
                residual,
                tolerance: ZERO_TOLERANCE,
            });
        }
    }
    scan_blocks(net, kin, d, options)
}

fn scan_blocks(
    net: &Network,
    kin: &PowerLawKinetics,
    d: &Decomposition,
    options: &BuildingBlockOptions,
) -> Result<Vec<BuildingBlockFinding>, DecompositionError> {
    let mut findings: Vec<BuildingBlockFinding> = Vec::new();
    for (b, block) in d.blocks.iter().enumerate() {
        let view = BlockKinetics::analyze(net, kin, &block.reactions);
        if !view.reactant_determined {
            continue; // every case requires reactant-determined kinetics
        }
        let report = block.subnetwork.structural_report();
        let certification = certify_lp(net, kin, block, &view, &report, b, options);

        for pair in block_sf_pairs(kin, block) {
            // The pair's rows differ in this species, so it occurs in the
            // block at least kinetically; the robustness conclusion is about
            // a species the block genuinely constrains.
            debug_assert!(
                kin.order_row(pair.reactions.0)[pair.species]
                    != kin.order_row(pair.reactions.1)[pair.species]
            );
            let case = if report.deficiency == 0
                && report.weakly_reversible
                && pair.same_linkage_class
            {
                Some((BlockCase::DeficiencyZeroWeaklyReversible, None))
            } else if report.deficiency == 1 && pair.reactants_nonterminal {
                Some((BlockCase::DeficiencyOneNonterminal, None))
            } else if view.cycle_terminal && pair.same_linkage_class && certification.is_some() {
                Some((BlockCase::CycleTerminalLp, certification))
            } else {
                None
            };
            if let Some((case, certification)) = case {
                debug_assert!(
                    !(case == BlockCase::DeficiencyZeroWeaklyReversible
                        && !pair.same_linkage_class),
                    "a deficiency-zero finding must keep its pair in one linkage class"
                );
                findings.push(BuildingBlockFinding {
                    block: b,
                    species: pair.species,
                    case,
                    sf_pair: pair.reactions,
                    block_deficiency: report.deficiency,
                    certification,
                });
            }
        }
    }

    // One finding per species: strongest case first, then lowest block.
    findings.sort_by_key(|f| (f.species, f.case, f.block, f.sf_pair));
    findings.dedup_by_key(|f| f.species);
    Ok(findings)
}

fn certify_lp(
    net: &Network,
    kin: &PowerLawKinetics,
    block: &Block,
    view: &BlockKinetics,
    report: &StructuralReport,
    block_index: usize,
    options: &BuildingBlockOptions,
) -> Option<LpCertification> {
    if view.cycle_terminal && view.reactant_determined {
        if let Ok(subspace) = block_kinetic_order_subspace(net, kin, &block.reactions) {
            // dim S̃_i never exceeds n_i − ℓ_i: the differences are the image
            // of the block incidence span under the kinetic-complex map.
            let n_minus_l = report.complexes - report.linkage_classes;
            assert!(subspace.dim() <= n_minus_l);
            if subspace.dim() == n_minus_l && report.weakly_reversible {
                return Some(LpCertification::KineticDeficiencyZero);
            }
        }
        if report.deficiency <= 1
            && report.t_minimal
            && linkage_class_deficiencies_sum(&block.subnetwork) == report.deficiency
            && block_is_tik(net, block, view)
        {
            return Some(LpCertification::TikLowDeficiency);
        }
    }
    if options.lp_asserted_blocks.contains(&block_index) {
        return Some(LpCertification::UserAsserted);
    }
    None
}

fn linkage_class_deficiencies_sum(sub: &Network) -> usize {
    let class_of = sub.linkage_class_of_reactions();
    let class_count = sub.linkage_classes().len();
    (0..class_count)
        .map(|c| {
            let reactions: Vec<usize> = class_of
                .iter()
                .enumerate()
                .filter(|(_, &cls)| cls == c)
                .map(|(i, _)| i)
                .collect();
            let piece = sub
                .subnetwork(&reactions)
                .expect("linkage classes are nonempty");
            piece.structural_report().deficiency
        })
        .sum()
}

/// `T̂`-rank maximality of a block, with kinetic complexes kept in parent
/// species coordinates (restricting them could merge distinct columns).
fn block_is_tik(net: &Network, block: &Block, view: &BlockKinetics) -> bool {
    let reactants: Vec<usize> = view.kinetic_complexes.keys().copied().collect();
    let m = net.species_count();
    let sub = &block.subnetwork;
    let sub_class_of = sub.linkage_class_of_complexes();
    let class_count = sub.linkage_classes().len();

    // Map parent complex -> subnetwork complex to read off linkage classes.
    let mut parent_to_sub = BTreeMap::new();
    for (pos, &idx) in block.reactions.iter().enumerate() {
        let parent = &net.reactions()[idx];
        let local = &sub.reactions()[pos];
        parent_to_sub.insert(parent.reactant, local.reactant);
        parent_to_sub.insert(parent.product, local.product);
    }

    let mut augmented = Matrix::zeros(m + class_count, reactants.len());
    for (c, parent_complex) in reactants.iter().enumerate() {
        for (r, value) in view.kinetic_complexes[parent_complex].iter().enumerate() {
            augmented[(r, c)] = value.clone();
        }
        let class = sub_class_of[parent_to_sub[parent_complex]];
        augmented[(m + class, c)] = Rat::one();
    }
    rank(&augmented) == augmented.cols()
}

/// SF-pairs among a block's reactions, compared on full parent rows, with
/// linkage-class and terminality annotations taken from the block digraph.
fn block_sf_pairs(kin: &PowerLawKinetics, block: &Block) -> Vec<crate::kinetics::SfPair> {
    let sub = &block.subnetwork;
    let linkage_of = sub.linkage_class_of_reactions();
    let terminal = sub.terminal_complexes();
    let mut pairs = Vec::new();
    for (pa, &i) in block.reactions.iter().enumerate() {
        for (offset, &j) in block.reactions[pa + 1..].iter().enumerate() {
            let pb = pa + 1 + offset;
            let diffs: Vec<usize> = kin
                .order_row(i)
                .iter()
                .zip(kin.order_row(j))
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(idx, _)| idx)
                .collect();
            if let [species] = diffs[..] {
                pairs.push(crate::kinetics::SfPair {
                    reactions: (i, j),
                    species,
                    same_linkage_class: linkage_of[pa] == linkage_of[pb],
                    reactants_nonterminal: !terminal[sub.reactions()[pa].reactant]
                        && !terminal[sub.reactions()[pb].reactant],
                });
            }
        }
    }
    pairs
}

/// Per-block robustness control: which blocks carry an LP structure, what
/// they certify, and the union lower bound for the whole network.
#[derive(Debug, Clone, PartialEq)]
pub struct LpControlReport {
    pub per_block: Vec<BlockControl>,
    /// Union of the controlled blocks' robust species (a lower bound for the
    /// network's robust set when the matching independence holds).
    pub union_lower_bound: Vec<usize>,
    /// True when every block contributed an LP set.
    pub fully_controlled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockControl {
    pub block: usize,
    pub species_count: usize,
    /// `dim P_i` when the block has an LP set.
    pub flux_dim: Option<usize>,
    pub robust_species: Option<Vec<usize>>,
}

/// Computes per-block robust species from the supplied block flux subspaces;
/// blocks without one are reported uncontrolled.
pub fn lp_control_report(
    net: &Network,
    d: &Decomposition,
    block_flux: &BTreeMap<usize, SubspaceBasis>,
) -> LpControlReport {
    let mut union = BTreeSet::new();
    let per_block = d
        .blocks
        .iter()
        .enumerate()
        .map(|(b, block)| {
            let species_count = block_species_indices(net, block).len();
            match block_flux.get(&b) {
                Some(flux) => {
                    let report = robust_species(flux, RobustKind::Generic);
                    union.extend(report.robust_species.iter().copied());
                    BlockControl {
                        block: b,
                        species_count,
                        flux_dim: Some(flux.dim()),
                        robust_species: Some(report.robust_species),
                    }
                }
                None => BlockControl {
                    block: b,
                    species_count,
                    flux_dim: None,
                    robust_species: None,
                },
            }
        })
        .collect::<Vec<_>>();
    LpControlReport {
        fully_controlled: per_block.iter().all(|c| c.flux_dim.is_some()),
        per_block,
        union_lower_bound: union.into_iter().collect(),
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{schmitz_decomposition, schmitz_kinetics};
    use super::*;
    use crate::network::fixtures::{complex, schmitz_network};
    use crate::rational::{rat, rat_int};
    use proptest::prelude::*;

    #[test]
    fn schmitz_decomposition_is_independent() {
        let net = schmitz_network();
        let d = schmitz_decomposition(&net);
        assert_eq!(d.block_count(), 2);
        let subspaces = block_stoichiometric_subspaces(&net, &d);
        assert_eq!(subspaces[0].dim(), 2);
        assert_eq!(subspaces[1].dim(), 3);
        assert!(is_independent(&net, &d));
        // Both blocks touch complex M1, yet the incidence images still sum
        // directly: (3−1) + (4−1) = 5 = n − ℓ = 6 − 1.
        assert!(is_incidence_independent(&net, &d));
    }

    #[test]
    fn schmitz_kinetic_subspaces() {
        let net = schmitz_network();
        let kin = schmitz_kinetics();
        let d = schmitz_decomposition(&net);

        let subs = block_kinetic_subspaces(&net, &kin, &d).unwrap();
        assert_eq!(subs[0].dim(), 2);
        assert_eq!(subs[1].dim(), 3);
        let refs: Vec<&SubspaceBasis> = subs.iter().collect();
        assert!(SubspaceBasis::is_direct_sum(&refs).unwrap());

        let flux = kinetic_flux_subspace(&net, &kin, &d).unwrap();
        assert_eq!(flux.dim(), 5);

        // The parameter subspace is the ray through
        // (25/9, 125/423, 25/9, 25/9, 1, 1).
        let param = flux.orthogonal_complement();
        assert_eq!(param.dim(), 1);
        let row = &param.basis_rows()[0];
        let scale = rat_int(1) / row[5].clone();
        let normalized: Vec<Rat> = row.iter().map(|x| x * &scale).collect();
        assert_eq!(
            normalized,
            vec![rat(25, 9), rat(125, 423), rat(25, 9), rat(25, 9), rat_int(1), rat_int(1)]
        );

        // No zero coordinate anywhere, so no species is robust.
        let report = robust_species(&flux, RobustKind::Acr);
        assert!(report.robust_species.is_empty());
        assert_eq!(report.bound, 5);
    }

    #[test]
    fn schmitz_kinetic_network_structure() {
        let net = schmitz_network();
        let kin = schmitz_kinetics();
        let d = schmitz_decomposition(&net);
        let kinetic = kinetic_network(&net, &kin, &d).unwrap();
        let report = kinetic.structural_report();
        // Per-block kinetic complexes: {M5, 0.36 M1, M6} and
        // {9.4 M2, M1, M3, M4}: seven vertices in two components.
        assert_eq!(report.complexes, 7);
        assert_eq!(report.linkage_classes, 2);
        assert_eq!(report.rank, 5);
        assert_eq!(
            kinetic.stoichiometric_subspace(),
            kinetic_flux_subspace(&net, &kin, &d).unwrap()
        );
    }

    #[test]
    fn partition_validation() {
        let net = schmitz_network();
        assert!(matches!(
            build_decomposition(&net, vec![("A".into(), vec![0, 1]), ("B".into(), vec![1, 2])]),
            Err(DecompositionError::OverlappingBlocks { reaction: 1, .. })
        ));
        assert!(matches!(
            build_decomposition(&net, vec![("A".into(), vec![0, 1, 2])]),
            Err(DecompositionError::MissingReactions(_))
        ));
        assert!(matches!(
            build_decomposition(
                &net,
                vec![("A".into(), vec![]), ("B".into(), (0..8).collect())]
            ),
            Err(DecompositionError::EmptyBlock(_))
        ));
        assert!(matches!(
            build_decomposition(&net, vec![("A".into(), vec![0, 99])]),
            Err(DecompositionError::ReactionOutOfRange { .. })
        ));

        let trivial = build_decomposition(&net, vec![("all".into(), (0..8).collect())]).unwrap();
        assert!(is_independent(&net, &trivial));
        assert!(is_incidence_independent(&net, &trivial));
    }

    #[test]
    fn repeated_reaction_vector_breaks_independence() {
        // A→B and A+C→B+C have the same reaction vector; splitting them into
        // two blocks cannot be independent.
        let net = Network::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(1, 1)])),
                (
                    "r2".into(),
                    complex(&[(0, 1), (2, 1)]),
                    complex(&[(1, 1), (2, 1)]),
                ),
            ],
        )
        .unwrap();
        let d = build_decomposition(
            &net,
            vec![("B1".into(), vec![0]), ("B2".into(), vec![1])],
        )
        .unwrap();
        assert!(!is_independent(&net, &d));
        // Four complexes in two linkage classes: (2−1)+(2−1) = 2 = 4−2.
        assert!(is_incidence_independent(&net, &d));
    }

    #[test]
    fn splitting_a_cycle_breaks_incidence_independence() {
        // A ⇄ B split into its two arcs: each block spans the same
        // one-dimensional incidence image, so the sum is not direct.
        let net = crate::network::fixtures::reversible_pair();
        let d = build_decomposition(
            &net,
            vec![("fwd".into(), vec![0]), ("bwd".into(), vec![1])],
        )
        .unwrap();
        assert!(!is_incidence_independent(&net, &d));
        assert!(!is_independent(&net, &d));
        assert!(matches!(
            propagate_robustness(&net, &d, &[BTreeSet::new(), BTreeSet::new()], RobustKind::Bcr),
            Err(DecompositionError::NotIncidenceIndependent)
        ));
    }

    #[test]
    fn propagation_unions_block_findings() {
        // Two disjoint reversible pairs; each block robust in one species.
        let net = Network::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(1, 1)])),
                ("r2".into(), complex(&[(1, 1)]), complex(&[(0, 1)])),
                ("r3".into(), complex(&[(2, 1)]), complex(&[(3, 1)])),
                ("r4".into(), complex(&[(3, 1)]), complex(&[(2, 1)])),
            ],
        )
        .unwrap();
        let d = build_decomposition(
            &net,
            vec![("L1".into(), vec![0, 1]), ("L2".into(), vec![2, 3])],
        )
        .unwrap();
        let per_block = vec![
            BTreeSet::from([0usize]),
            BTreeSet::from([2usize]),
        ];
        let lifted = propagate_robustness(&net, &d, &per_block, RobustKind::Acr).unwrap();
        assert_eq!(lifted, BTreeSet::from([0, 2]));

        // A species outside its block is rejected.
        let bad = vec![BTreeSet::from([2usize]), BTreeSet::new()];
        assert!(matches!(
            propagate_robustness(&net, &d, &bad, RobustKind::Acr),
            Err(DecompositionError::RobustSpeciesOutsideBlock { block: 0, species: 2 })
        ));

        assert!(matches!(
            propagate_robustness(&net, &d, &per_block, RobustKind::Generic),
            Err(DecompositionError::UnsupportedKind)
        ));
    }

    #[test]
    fn schmitz_blocks_raise_no_findings() {
        let net = schmitz_network();
        let kin = schmitz_kinetics();
        let d = schmitz_decomposition(&net);
        let findings =
            building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert!(findings.is_empty(), "no block carries an SF-pair");
        let findings =
            building_blocks_bcr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert!(findings.is_empty());
    }

    /// Two reversible pairs in separate linkage classes; the kinetic rows of
    /// the A ⇄ B class form an SF-pair in species B.
    fn deficiency_zero_sf_network() -> (Network, PowerLawKinetics) {
        let net = Network::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(1, 1)])),
                ("r2".into(), complex(&[(1, 1)]), complex(&[(0, 1)])),
                ("r3".into(), complex(&[(2, 1)]), complex(&[(3, 1)])),
                ("r4".into(), complex(&[(3, 1)]), complex(&[(2, 1)])),
            ],
        )
        .unwrap();
        let kin = PowerLawKinetics::new(
            Matrix::from_i64(vec![
                vec![1, 0, 0, 0],
                vec![1, 2, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
            ]),
            None,
        )
        .unwrap();
        (net, kin)
    }

    #[test]
    fn deficiency_zero_case_fires_inside_a_linkage_class() {
        let (net, kin) = deficiency_zero_sf_network();
        let d = build_decomposition(
            &net,
            vec![("L1".into(), vec![0, 1]), ("L2".into(), vec![2, 3])],
        )
        .unwrap();
        let findings =
            building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].species, 1);
        assert_eq!(findings[0].case, BlockCase::DeficiencyZeroWeaklyReversible);
        assert_eq!(findings[0].sf_pair, (0, 1));
        assert_eq!(findings[0].block, 0);

        // Linkage-class decompositions are incidence independent, so the
        // same block certifies BCR.
        let findings =
            building_blocks_bcr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].species, 1);
    }

    #[test]
    fn deficiency_zero_pair_across_linkage_classes_is_rejected() {
        // One block containing both reversible pairs (deficiency zero,
        // weakly reversible, reactant-determined), but the only SF-pair
        // spans the two linkage classes: no finding may be emitted.
        let net = Network::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into(), "X".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(1, 1)])),
                ("r2".into(), complex(&[(1, 1)]), complex(&[(0, 1)])),
                ("r3".into(), complex(&[(2, 1)]), complex(&[(3, 1)])),
                ("r4".into(), complex(&[(3, 1)]), complex(&[(2, 1)])),
            ],
        )
        .unwrap();
        // Rows of r1 and r3 differ exactly in X; all other pairs differ in
        // two or more coordinates.
        let kin = PowerLawKinetics::new(
            Matrix::from_i64(vec![
                vec![1, 0, 0, 0, 1],
                vec![0, 1, 0, 0, 0],
                vec![1, 0, 0, 0, 3],
                vec![0, 0, 0, 1, 0],
            ]),
            None,
        )
        .unwrap();
        let d = build_decomposition(&net, vec![("all".into(), vec![0, 1, 2, 3])]).unwrap();
        let report = d.blocks()[0].subnetwork.structural_report();
        assert_eq!(report.deficiency, 0);
        assert!(report.weakly_reversible);
        let pairs = sf_pairs_of(&net, &kin);
        assert_eq!(pairs, vec![(0, 2, 4)]);

        let findings =
            building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert!(
            findings.is_empty(),
            "an SF-pair spanning linkage classes of a deficiency-zero block proves nothing"
        );
    }

    fn sf_pairs_of(net: &Network, kin: &PowerLawKinetics) -> Vec<(usize, usize, usize)> {
        crate::kinetics::sf_pairs(net, kin)
            .unwrap()
            .into_iter()
            .map(|p| (p.reactions.0, p.reactions.1, p.species))
            .collect()
    }

    #[test]
    fn deficiency_one_nonterminal_case() {
        // A → B, A+B → B, B → 2B: deficiency one, SF-pair (r1, r2) in B with
        // both reactant complexes nonterminal.
        let net = Network::new(
            vec!["A".into(), "B".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(1, 1)])),
                ("r2".into(), complex(&[(0, 1), (1, 1)]), complex(&[(1, 1)])),
                ("r3".into(), complex(&[(1, 1)]), complex(&[(1, 2)])),
            ],
        )
        .unwrap();
        let kin = PowerLawKinetics::new(
            Matrix::from_i64(vec![vec![1, 0], vec![1, 2], vec![0, 1]]),
            None,
        )
        .unwrap();
        let d = build_decomposition(&net, vec![("all".into(), vec![0, 1, 2])]).unwrap();
        let report = d.blocks()[0].subnetwork.structural_report();
        assert_eq!(report.deficiency, 1);

        let findings =
            building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].case, BlockCase::DeficiencyOneNonterminal);
        assert_eq!(findings[0].species, 1);
    }

    #[test]
    fn terminal_reactants_block_the_deficiency_one_case() {
        // A → B ⇄ 2B ⇄ 3B: deficiency one, but the SF-pair (r2, r3) sits on
        // terminal reactant complexes, the network is not weakly reversible,
        // and neither LP certificate applies, so no finding on any path.
        let net = Network::new(
            vec!["A".into(), "B".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(1, 1)])),
                ("r2".into(), complex(&[(1, 1)]), complex(&[(1, 2)])),
                ("r3".into(), complex(&[(1, 2)]), complex(&[(1, 1)])),
                ("r4".into(), complex(&[(1, 2)]), complex(&[(1, 3)])),
                ("r5".into(), complex(&[(1, 3)]), complex(&[(1, 2)])),
            ],
        )
        .unwrap();
        let kin = PowerLawKinetics::mass_action(&net);
        let d = build_decomposition(&net, vec![("all".into(), (0..5).collect())]).unwrap();
        let report = d.blocks()[0].subnetwork.structural_report();
        assert_eq!(report.deficiency, 1);
        assert!(!report.weakly_reversible);

        let pairs = crate::kinetics::sf_pairs(&net, &kin).unwrap();
        assert!(pairs
            .iter()
            .any(|p| p.same_linkage_class && !p.reactants_nonterminal));
        let findings =
            building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert!(findings.is_empty());
    }

    #[test]
    fn cycle_terminal_lp_case_with_zero_kinetic_deficiency() {
        // Three complexes A, 2A, 3A in one cycle: deficiency one, weakly
        // reversible, cycle terminal. The kinetic complexes (1,0), (2,1),
        // (1,1) span the plane, so the kinetic deficiency is zero and the
        // block is an LP system with full flux subspace. SF-pairs: (r1, r3)
        // in B and (r2, r3) in A.
        let net = Network::new(
            vec!["A".into(), "B".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(0, 2)])),
                ("r2".into(), complex(&[(0, 2)]), complex(&[(0, 3)])),
                ("r3".into(), complex(&[(0, 3)]), complex(&[(0, 1)])),
            ],
        )
        .unwrap();
        let kin = PowerLawKinetics::new(
            Matrix::from_i64(vec![vec![1, 0], vec![2, 1], vec![1, 1]]),
            None,
        )
        .unwrap();
        let d = build_decomposition(&net, vec![("all".into(), vec![0, 1, 2])]).unwrap();
        let report = d.blocks()[0].subnetwork.structural_report();
        assert_eq!(report.deficiency, 1);
        assert!(report.weakly_reversible);

        let findings =
            building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert_eq!(findings.len(), 2);
        for f in &findings {
            assert_eq!(f.case, BlockCase::CycleTerminalLp);
            assert_eq!(f.certification, Some(LpCertification::KineticDeficiencyZero));
        }
        let species: Vec<usize> = findings.iter().map(|f| f.species).collect();
        assert_eq!(species, vec![0, 1]);

        // Cross-check through the hyperplane criterion: S̃ = R^2, so every
        // species is robust on the block LP set.
        let flux = block_kinetic_order_subspace(&net, &kin, &[0, 1, 2]).unwrap();
        assert_eq!(flux.dim(), 2);
        let report = robust_species(&flux, RobustKind::Acr);
        assert_eq!(report.robust_species, vec![0, 1]);
    }

    #[test]
    fn user_assertion_certifies_remaining_blocks() {
        // Same 3-cycle but with kinetic complexes collapsed onto a line:
        // S̃ = span{(1,0)} gives kinetic deficiency 3−1−1 = 1, and the
        // augmented T-matrix has rank 2 < 3, so both automatic certificates
        // fail; a caller assertion still applies.
        let net = Network::new(
            vec!["A".into(), "B".into()],
            vec![
                ("r1".into(), complex(&[(0, 1)]), complex(&[(0, 2)])),
                ("r2".into(), complex(&[(0, 2)]), complex(&[(0, 3)])),
                ("r3".into(), complex(&[(0, 3)]), complex(&[(0, 1)])),
            ],
        )
        .unwrap();
        let kin = PowerLawKinetics::new(
            Matrix::from_i64(vec![vec![1, 0], vec![2, 0], vec![3, 0]]),
            None,
        )
        .unwrap();
        let d = build_decomposition(&net, vec![("all".into(), vec![0, 1, 2])]).unwrap();
        let none = building_blocks_acr(&net, &kin, &d, &BuildingBlockOptions::default()).unwrap();
        assert!(none.is_empty());

        let options = BuildingBlockOptions {
            equilibrium: EquilibriumEvidence::Asserted,
            lp_asserted_blocks: BTreeSet::from([0usize]),
        };
        let findings = building_blocks_acr(&net, &kin, &d, &options).unwrap();
        assert!(!findings.is_empty());
        assert!(findings
            .iter()
            .all(|f| f.certification == Some(LpCertification::UserAsserted)));
    }

    #[test]
    fn witness_validation() {
        let (net, kin) = deficiency_zero_sf_network();
        let d = build_decomposition(
            &net,
            vec![("L1".into(), vec![0, 1]), ("L2".into(), vec![2, 3])],
        )
        .unwrap();
        let rated = kin.clone().with_rates(vec![rat_int(1); 4]).unwrap();
        // x = (1,1,1,1) balances both reversible pairs exactly.
        let ok = BuildingBlockOptions {
            equilibrium: EquilibriumEvidence::Witness(vec![1.0; 4]),
            lp_asserted_blocks: BTreeSet::new(),
        };
        assert!(building_blocks_acr(&net, &rated, &d, &ok).is_ok());

        // x = (1,2,1,1): the backward rate x_A·x_B² = 4 overwhelms the
        // forward rate 1, so A is not balanced.
        let bad = BuildingBlockOptions {
            equilibrium: EquilibriumEvidence::Witness(vec![1.0, 2.0, 1.0, 1.0]),
            lp_asserted_blocks: BTreeSet::new(),
        };
        assert!(matches!(
            building_blocks_acr(&net, &rated, &d, &bad),
            Err(DecompositionError::WitnessRejected { .. })
        ));
    }

    #[test]
    fn control_report_tracks_uncontrolled_blocks() {
        let net = schmitz_network();
        let kin = schmitz_kinetics();
        let d = schmitz_decomposition(&net);
        let subs = block_kinetic_subspaces(&net, &kin, &d).unwrap();

        let all: BTreeMap<usize, SubspaceBasis> =
            subs.iter().cloned().enumerate().collect();
        let report = lp_control_report(&net, &d, &all);
        assert!(report.fully_controlled);
        assert!(report.union_lower_bound.is_empty());
        assert_eq!(report.per_block[0].flux_dim, Some(2));
        assert_eq!(report.per_block[1].flux_dim, Some(3));
        assert!(report.per_block.iter().all(|c| {
            c.robust_species.as_ref().map(Vec::len).unwrap_or(0) <= c.flux_dim.unwrap()
        }));

        let partial: BTreeMap<usize, SubspaceBasis> =
            [(0usize, subs[0].clone())].into_iter().collect();
        let report = lp_control_report(&net, &d, &partial);
        assert!(!report.fully_controlled);
        assert_eq!(report.per_block[1].flux_dim, None);

        let empty = lp_control_report(&net, &d, &BTreeMap::new());
        assert!(empty.union_lower_bound.is_empty());
        assert!(!empty.fully_controlled);
    }

    /// Networks with `k ≥ 2` linkage classes built from disjoint complex
    /// pools, each component a path plus optional extra arcs.
    fn arb_multi_class_network() -> impl Strategy<Value = (Network, Vec<Vec<usize>>)> {
        (2usize..=3, 2usize..=4).prop_flat_map(|(classes, size)| {
            let arcs = proptest::collection::vec(
                proptest::collection::btree_set((0usize..size, 0usize..size), 1..=5),
                classes,
            );
            (Just(classes), Just(size), arcs).prop_map(|(classes, size, arcs)| {
                // Species S0..S3; component c uses complexes (c·size + v + 1)·S_{v mod m}
                // so complexes of different components never coincide.
                let m = 4usize;
                let species: Vec<String> = (0..m).map(|i| format!("S{i}")).collect();
                let mut reactions = Vec::new();
                let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); classes];
                for (c, extra) in arcs.iter().enumerate() {
                    let vertex = |v: usize| {
                        Complex::new(vec![(v % m, rat_int((c * size + v + 1) as i64))]).unwrap()
                    };
                    // Spanning path keeps the component connected.
                    for v in 0..size - 1 {
                        blocks[c].push(reactions.len());
                        reactions.push((
                            format!("c{c}p{v}"),
                            vertex(v),
                            vertex(v + 1),
                        ));
                    }
                    for (i, &(a, b)) in extra.iter().enumerate() {
                        if a == b || (b == a + 1 && a < size - 1) {
                            continue;
                        }
                        blocks[c].push(reactions.len());
                        reactions.push((format!("c{c}e{i}"), vertex(a), vertex(b)));
                    }
                }
                let net = Network::new(species, reactions).unwrap();
                (net, blocks)
            })
        })
    }

    proptest! {
        #[test]
        fn linkage_class_decompositions_are_incidence_independent(
            (net, blocks) in arb_multi_class_network()
        ) {
            prop_assume!(net.linkage_classes().len() >= 2);
            let named: Vec<(String, Vec<usize>)> = blocks
                .into_iter()
                .enumerate()
                .filter(|(_, b)| !b.is_empty())
                .map(|(i, b)| (format!("L{i}"), b))
                .collect();
            let d = build_decomposition(&net, named).unwrap();
            prop_assert!(is_incidence_independent(&net, &d));
        }

        #[test]
        fn independence_agrees_with_rank_oracle((net, blocks) in arb_multi_class_network()) {
            let named: Vec<(String, Vec<usize>)> = blocks
                .into_iter()
                .enumerate()
                .filter(|(_, b)| !b.is_empty())
                .map(|(i, b)| (format!("L{i}"), b))
                .collect();
            let d = build_decomposition(&net, named).unwrap();
            // Oracle: stack all block bases and compare ranks directly.
            let subspaces = block_stoichiometric_subspaces(&net, &d);
            let mut stacked = Vec::new();
            for s in &subspaces {
                stacked.extend(s.basis_rows());
            }
            let stacked_rank = rank(&Matrix::from_rows(net.species_count(), stacked));
            let dims: usize = subspaces.iter().map(SubspaceBasis::dim).sum();
            prop_assert_eq!(is_independent(&net, &d), stacked_rank == dims);
        }
    }
}
