//! Reaction networks and their structural indices.
//!
//! A network is a digraph whose vertices (complexes) are nonnegative rational
//! combinations of species and whose arcs are reactions. This module computes
//! the classical structure theory: stoichiometric and incidence matrices,
//! linkage / strong / terminal-strong classes, rank, deficiency, the
//! reversibility and terminality flags, conservativity, and subnetwork
//! extraction.

use crate::linalg::{rank, Matrix, SubspaceBasis};
use crate::rational::{rat_display, Rat};
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("duplicate species name `{0}`")]
    DuplicateSpecies(String),
    #[error("reaction `{0}`: unknown species index {1}")]
    UnknownSpecies(String, usize),
    #[error("reaction `{0}`: negative stoichiometric coefficient for `{1}`")]
    NegativeCoefficient(String, String),
    #[error("reaction `{0}` is a self-loop (reactant equals product)")]
    SelfLoop(String),
    #[error("reactions `{0}` and `{1}` duplicate the arc {2}")]
    DuplicateArc(String, String, String),
    #[error("network has no reactions")]
    Empty,
    #[error("subnetwork selection is empty")]
    EmptySelection,
    #[error("reaction index {0} out of range ({1} reactions)")]
    ReactionIndexOutOfRange(usize, usize),
}

/// A complex: nonnegative rational coefficients over species, stored sparsely
/// (ascending species index, zero coefficients omitted). Two complexes with
/// the same coefficient vector are the same graph vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Complex {
    coeffs: Vec<(usize, Rat)>,
}

impl Complex {
    /// Builds a complex from (species, coefficient) pairs; merges repeats,
    /// drops zeros, rejects negatives.
    pub fn new(pairs: impl IntoIterator<Item = (usize, Rat)>) -> Result<Self, String> {
        let mut map: BTreeMap<usize, Rat> = BTreeMap::new();
        for (idx, coeff) in pairs {
            if coeff.is_negative() {
                return Err(format!("negative coefficient for species {idx}"));
            }
            if coeff.is_zero() {
                continue;
            }
            *map.entry(idx).or_insert_with(Rat::zero) += coeff;
        }
        Ok(Complex {
            coeffs: map.into_iter().collect(),
        })
    }

    /// The zero complex (all coefficients zero), used for inflow/outflow arcs.
    pub fn zero() -> Self {
        Complex { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, species: usize) -> Rat {
        self.coeffs
            .iter()
            .find(|(s, _)| *s == species)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Rat)> {
        self.coeffs.iter()
    }

    pub fn species_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().map(|(s, _)| *s)
    }

    /// Dense coefficient vector in `Rat^m`.
    pub fn to_vector(&self, m: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); m];
        for (s, c) in &self.coeffs {
            v[*s] = c.clone();
        }
        v
    }

    /// Renders as `2 A1 + A3`, or `0` for the zero complex.
    pub fn render(&self, species: &[String]) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|(s, c)| {
                if c.is_one() {
                    species[*s].clone()
                } else {
                    format!("{} {}", rat_display(c), species[*s])
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A labeled arc between two complex vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub reactant: usize,
    pub product: usize,
    pub label: String,
}

/// Validated reaction network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    species: Vec<String>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

impl Network {
    /// Builds and validates a network from species names and labeled
    /// (reactant, product) complex pairs.
    ///
    /// Complexes are deduplicated by exact coefficient equality, so two
    /// textually different but numerically equal complexes become one vertex.
    /// Self-loops and parallel arcs are rejected; every vertex ends up with
    /// positive degree by construction.
    pub fn new(
        species: Vec<String>,
        reactions: Vec<(String, Complex, Complex)>,
    ) -> Result<Self, NetworkError> {
        let mut seen = BTreeSet::new();
        for name in &species {
            if !seen.insert(name.clone()) {
                return Err(NetworkError::DuplicateSpecies(name.clone()));
            }
        }
        if reactions.is_empty() {
            return Err(NetworkError::Empty);
        }

        let m = species.len();
        let mut complexes: Vec<Complex> = Vec::new();
        let mut index_of: BTreeMap<Complex, usize> = BTreeMap::new();
        let mut arcs: Vec<Reaction> = Vec::new();
        let mut arc_set: BTreeMap<(usize, usize), String> = BTreeMap::new();

        for (label, reactant, product) in reactions {
            for c in [&reactant, &product] {
                if let Some(bad) = c.species_indices().find(|&s| s >= m) {
                    return Err(NetworkError::UnknownSpecies(label, bad));
                }
            }
            let r_idx = *index_of.entry(reactant.clone()).or_insert_with(|| {
                complexes.push(reactant.clone());
                complexes.len() - 1
            });
            let p_idx = *index_of.entry(product.clone()).or_insert_with(|| {
                complexes.push(product.clone());
                complexes.len() - 1
            });
            if r_idx == p_idx {
                return Err(NetworkError::SelfLoop(label));
            }
            if let Some(prev) = arc_set.get(&(r_idx, p_idx)) {
                let arc = format!(
                    "{} -> {}",
                    complexes[r_idx].render(&species),
                    complexes[p_idx].render(&species)
                );
                return Err(NetworkError::DuplicateArc(prev.clone(), label, arc));
            }
            arc_set.insert((r_idx, p_idx), label.clone());
            arcs.push(Reaction {
                reactant: r_idx,
                product: p_idx,
                label,
            });
        }

        Ok(Network {
            species,
            complexes,
            reactions: arcs,
        })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn complex_count(&self) -> usize {
        self.complexes.len()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    pub fn reaction_label(&self, idx: usize) -> &str {
        &self.reactions[idx].label
    }

    /// Indices of complexes that appear as a reactant of some reaction.
    pub fn reactant_complexes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.reactions.iter().map(|r| r.reactant).collect();
        set.into_iter().collect()
    }

    /// `m × r` matrix whose column for a reaction is product − reactant in
    /// species coordinates.
    pub fn stoichiometric_matrix(&self) -> Matrix {
        let m = self.species.len();
        let mut mat = Matrix::zeros(m, self.reactions.len());
        for (j, rxn) in self.reactions.iter().enumerate() {
            for (s, c) in self.complexes[rxn.product].iter() {
                mat[(*s, j)] += c.clone();
            }
            for (s, c) in self.complexes[rxn.reactant].iter() {
                mat[(*s, j)] -= c.clone();
            }
        }
        mat
    }

    /// `n × r` incidence matrix: −1 at the reactant row, +1 at the product row.
    pub fn incidence_matrix(&self) -> Matrix {
        let mut mat = Matrix::zeros(self.complexes.len(), self.reactions.len());
        for (j, rxn) in self.reactions.iter().enumerate() {
            mat[(rxn.reactant, j)] = -Rat::one();
            mat[(rxn.product, j)] = Rat::one();
        }
        mat
    }

    /// Span of the reaction vectors in species space.
    pub fn stoichiometric_subspace(&self) -> SubspaceBasis {
        self.stoichiometric_subspace_of(&(0..self.reactions.len()).collect::<Vec<_>>())
    }

    /// Span of the reaction vectors of a reaction subset, still in the
    /// *parent* species coordinates. This is what decomposition tests sum.
    pub fn stoichiometric_subspace_of(&self, reaction_indices: &[usize]) -> SubspaceBasis {
        let m = self.species.len();
        let rows = reaction_indices
            .iter()
            .map(|&j| {
                let rxn = &self.reactions[j];
                let mut v = self.complexes[rxn.product].to_vector(m);
                for (s, c) in self.complexes[rxn.reactant].iter() {
                    v[*s] -= c.clone();
                }
                v
            })
            .collect();
        SubspaceBasis::from_rows(m, rows)
    }

    /// Network rank: dimension of the stoichiometric subspace.
    pub fn rank(&self) -> usize {
        rank(&self.stoichiometric_matrix())
    }

    /// Connected components of the underlying undirected graph, each a sorted
    /// list of complex indices. Components are ordered by smallest member.
    pub fn linkage_classes(&self) -> Vec<Vec<usize>> {
        let n = self.complexes.len();
        let mut adj = vec![Vec::new(); n];
        for rxn in &self.reactions {
            adj[rxn.reactant].push(rxn.product);
            adj[rxn.product].push(rxn.reactant);
        }
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            classes.push(comp);
        }
        classes
    }

    /// Strongly connected components of the reaction digraph (Tarjan),
    /// each sorted, ordered by smallest member.
    pub fn strong_linkage_classes(&self) -> Vec<Vec<usize>> {
        let n = self.complexes.len();
        let mut adj = vec![Vec::new(); n];
        for rxn in &self.reactions {
            adj[rxn.reactant].push(rxn.product);
        }
        let mut comps = tarjan_scc(&adj);
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// The strong classes with no arc leaving them.
    pub fn terminal_strong_linkage_classes(&self) -> Vec<Vec<usize>> {
        let strong = self.strong_linkage_classes();
        let mut comp_of = vec![usize::MAX; self.complexes.len()];
        for (cid, comp) in strong.iter().enumerate() {
            for &v in comp {
                comp_of[v] = cid;
            }
        }
        let mut has_out = vec![false; strong.len()];
        for rxn in &self.reactions {
            if comp_of[rxn.reactant] != comp_of[rxn.product] {
                has_out[comp_of[rxn.reactant]] = true;
            }
        }
        strong
            .into_iter()
            .enumerate()
            .filter(|(cid, _)| !has_out[*cid])
            .map(|(_, c)| c)
            .collect()
    }

    /// True when the complex sits in a terminal strong class.
    pub fn terminal_complexes(&self) -> Vec<bool> {
        let mut terminal = vec![false; self.complexes.len()];
        for class in self.terminal_strong_linkage_classes() {
            for v in class {
                terminal[v] = true;
            }
        }
        terminal
    }

    /// Maps each complex to the index of its linkage class.
    pub fn linkage_class_of_complexes(&self) -> Vec<usize> {
        let classes = self.linkage_classes();
        let mut of = vec![usize::MAX; self.complexes.len()];
        for (cid, class) in classes.iter().enumerate() {
            for &v in class {
                of[v] = cid;
            }
        }
        of
    }

    /// Linkage class index of each reaction (both endpoints always agree).
    pub fn linkage_class_of_reactions(&self) -> Vec<usize> {
        let of = self.linkage_class_of_complexes();
        self.reactions.iter().map(|r| of[r.reactant]).collect()
    }

    /// All counts, the deficiency, and the classification flags.
    pub fn structural_report(&self) -> StructuralReport {
        let n = self.complexes.len();
        let n_r = self.reactant_complexes().len();
        let linkage = self.linkage_classes().len();
        let strong = self.strong_linkage_classes().len();
        let terminal = self.terminal_strong_linkage_classes().len();
        let s = self.rank();
        assert!(n >= linkage + s, "deficiency must be nonnegative");
        let deficiency = n - linkage - s;
        let conservation_witness = self
            .stoichiometric_subspace()
            .orthogonal_complement()
            .positive_vector();
        StructuralReport {
            species: self.species.len(),
            complexes: n,
            reactant_complexes: n_r,
            reactions: self.reactions.len(),
            linkage_classes: linkage,
            strong_linkage_classes: strong,
            terminal_strong_linkage_classes: terminal,
            rank: s,
            deficiency,
            weakly_reversible: strong == linkage,
            t_minimal: terminal == linkage,
            point_terminal: terminal == n - n_r,
            cycle_terminal: n == n_r,
            conservative: conservation_witness.is_some(),
            conservation_witness,
        }
    }

    /// Restriction to a nonempty reaction subset. Species and complexes are
    /// trimmed to those that occur; species keep their relative order.
    pub fn subnetwork(&self, reaction_indices: &[usize]) -> Result<Network, NetworkError> {
        if reaction_indices.is_empty() {
            return Err(NetworkError::EmptySelection);
        }
        for &idx in reaction_indices {
            if idx >= self.reactions.len() {
                return Err(NetworkError::ReactionIndexOutOfRange(
                    idx,
                    self.reactions.len(),
                ));
            }
        }
        let mut used_species = BTreeSet::new();
        for &idx in reaction_indices {
            let rxn = &self.reactions[idx];
            for c in [rxn.reactant, rxn.product] {
                used_species.extend(self.complexes[c].species_indices());
            }
        }
        let old_to_new: BTreeMap<usize, usize> = used_species
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let species: Vec<String> = used_species
            .iter()
            .map(|&s| self.species[s].clone())
            .collect();
        let remap = |c: &Complex| {
            Complex::new(c.iter().map(|(s, coeff)| (old_to_new[s], coeff.clone())))
                .expect("coefficients already validated")
        };
        let reactions = reaction_indices
            .iter()
            .map(|&idx| {
                let rxn = &self.reactions[idx];
                (
                    rxn.label.clone(),
                    remap(&self.complexes[rxn.reactant]),
                    remap(&self.complexes[rxn.product]),
                )
            })
            .collect();
        Network::new(species, reactions)
    }
}

/// Structural counts and classification flags of a network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralReport {
    pub species: usize,
    pub complexes: usize,
    pub reactant_complexes: usize,
    pub reactions: usize,
    pub linkage_classes: usize,
    pub strong_linkage_classes: usize,
    pub terminal_strong_linkage_classes: usize,
    pub rank: usize,
    pub deficiency: usize,
    pub weakly_reversible: bool,
    pub t_minimal: bool,
    pub point_terminal: bool,
    pub cycle_terminal: bool,
    pub conservative: bool,
    pub conservation_witness: Option<Vec<Rat>>,
}

fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        comps: Vec<Vec<usize>>,
    }

    fn connect(v: usize, st: &mut State) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;

        for &w in &st.adj[v] {
            if st.idx[w].is_none() {
                connect(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }

        if st.low[v] == st.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.comps.push(comp);
        }
    }

    let n = adj.len();
    let mut st = State {
        adj,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            connect(v, &mut st);
        }
    }
    st.comps
}
