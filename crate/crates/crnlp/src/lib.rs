//! Concentration robustness analysis for reaction networks with power-law
//! and poly-power-law kinetics.
//!
//! The crate models chemical reaction networks as digraphs of stoichiometric
//! complexes, computes the classical structural indices (linkage classes,
//! rank, deficiency, terminality), and decides absolute / balanced
//! concentration robustness for log-parametrized equilibria sets through the
//! species hyperplane criterion. All linear algebra is exact rational
//! arithmetic; floating point appears only where logarithms force it
//! (Birch points, numeric equilibrium checks).
//!
//! A guide with worked examples lives in `book/`; its code snippets are
//! compiled as doc-tests from this crate, so the book cannot drift from the
//! library.

pub mod cli;
pub mod decomposition;
pub mod io;
pub mod kinetics;
pub mod linalg;
pub mod network;
mod numeric;
pub mod rational;
pub mod replicator;
pub mod robustness;

pub use kinetics::{Kinetics, PolyPlKinetics, PowerLawKinetics};
pub use linalg::{Matrix, SubspaceBasis};
pub use network::{Complex, Network, StructuralReport};
pub use rational::Rat;
pub use robustness::{LpKind, LpSet, RobustKind, RobustnessReport};

// The guide's code blocks compile and run as doc-tests, so `book/` and the
// library cannot drift apart.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(networks, "../../../book/src/networks.md");
    chapter!(exact_linear_algebra, "../../../book/src/exact-linear-algebra.md");
    chapter!(kinetics, "../../../book/src/kinetics.md");
    chapter!(lp_sets, "../../../book/src/lp-sets.md");
    chapter!(decompositions, "../../../book/src/decompositions.md");
    chapter!(replicator_games, "../../../book/src/replicator-games.md");
    chapter!(file_format, "../../../book/src/file-format.md");
    chapter!(json_reports, "../../../book/src/json-reports.md");
}
