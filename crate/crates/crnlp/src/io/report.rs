//! JSON report types and deterministic emission.
//!
//! Reports serialize through `serde_json::Value`, whose object maps are
//! ordered, so identical reports always produce byte-identical text with
//! sorted keys. Exact rationals appear as `{num, den, decimal}` where
//! `decimal` is a fixed six-place rendering; exactness lives in `num`/`den`.

use crate::linalg::SubspaceBasis;
use crate::network::Network;
use crate::rational::{decimal_string, Rat};
use serde::{Deserialize, Serialize};

/// Schema tag carried by every report.
pub const SCHEMA: &str = "crnlp-report-v1";

/// Exact rational with a human-friendly decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: String,
    pub den: String,
    pub decimal: String,
}

impl From<&Rat> for RatJson {
    fn from(r: &Rat) -> Self {
        RatJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            decimal: decimal_string(r),
        }
    }
}

pub fn rat_vec(values: &[Rat]) -> Vec<RatJson> {
    values.iter().map(RatJson::from).collect()
}

pub fn basis_rows_json(basis: &SubspaceBasis) -> Vec<Vec<RatJson>> {
    basis.basis_rows().iter().map(|row| rat_vec(row)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub schema: String,
    pub command: String,
    pub species: Vec<String>,
    pub complexes: Vec<String>,
    pub reactions: Vec<String>,
    pub m: usize,
    pub n: usize,
    pub n_r: usize,
    pub r: usize,
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
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation_witness: Option<Vec<RatJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservativityJson {
    pub conservative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_witness: Option<Vec<RatJson>>,
    pub consistent: bool,
    pub conclusion: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessJson {
    pub schema: String,
    pub command: String,
    pub kind: String,
    pub flux_source: String,
    pub species: Vec<String>,
    pub flux_dim: usize,
    pub parameter_dim: usize,
    pub parameter_basis: Vec<Vec<RatJson>>,
    pub robust_species: Vec<String>,
    /// Per-species: true when its coordinate vanishes in every basis row.
    pub zero_coordinate_table: std::collections::BTreeMap<String, bool>,
    /// `dim P`, the cap on how many species can be robust.
    pub bound: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservativity: Option<ConservativityJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub name: String,
    pub reactions: Vec<String>,
    pub species: Vec<String>,
    pub rank: usize,
    pub deficiency: usize,
    pub weakly_reversible: bool,
    pub cycle_terminal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robust_species: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub schema: String,
    pub command: String,
    pub flux_source: String,
    pub blocks: Vec<BlockJson>,
    pub independent: bool,
    pub incidence_independent: bool,
    pub fully_controlled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Union of controlled blocks' robust species; a lower bound for the
    /// network when the matching independence holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagated_robust_species: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingJson {
    pub block: String,
    pub species: String,
    pub case: String,
    pub sf_pair: Vec<String>,
    pub block_deficiency: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlocksReport {
    pub schema: String,
    pub command: String,
    pub kind: String,
    pub equilibrium: String,
    pub independent: bool,
    pub incidence_independent: bool,
    pub findings: Vec<FindingJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFailureJson {
    /// 1-based term index.
    pub term: usize,
    pub species: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub holds: bool,
    pub vacuous: bool,
    pub failures: Vec<ConditionFailureJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummandJson {
    pub index: usize,
    pub t_rank_maximal: bool,
    pub kinetic_order_dim: usize,
    pub kinetic_deficiency: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicatorReport {
    pub schema: String,
    pub command: String,
    pub species: Vec<String>,
    pub term_count: usize,
    pub condition: ConditionJson,
    pub complexes: usize,
    pub linkage_classes: usize,
    pub deficiency: usize,
    pub weakly_reversible: bool,
    pub summands: Vec<SummandJson>,
    pub parameter_dim: usize,
    pub robust_species: Vec<String>,
    pub unique_positive_equilibrium: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirchReport {
    pub schema: String,
    pub command: String,
    pub point: Vec<f64>,
    pub iterations: usize,
    pub flux_class_residual: f64,
    pub lp_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema: String,
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    /// `parse`, `validation`, or `precondition`.
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
}

/// Deterministic pretty JSON: identical reports emit identical bytes, with
/// object keys sorted.
pub fn emit_report<T: Serialize>(report: &T) -> String {
    let value = serde_json::to_value(report).expect("reports are plain data");
    serde_json::to_string_pretty(&value).expect("JSON value always serializes")
}

/// Renders every complex of a network as `2 A1 + A3` strings.
pub fn complex_strings(net: &Network) -> Vec<String> {
    net.complexes()
        .iter()
        .map(|c| c.render(net.species()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rational_rendering() {
        let r = RatJson::from(&rat(25, 9));
        assert_eq!(r.num, "25");
        assert_eq!(r.den, "9");
        assert_eq!(r.decimal, "2.777778");
    }

    #[test]
    fn emission_is_sorted_and_deterministic() {
        let report = BirchReport {
            schema: SCHEMA.into(),
            command: "birch".into(),
            point: vec![2.414213562373095, 0.41421356237309515],
            iterations: 6,
            flux_class_residual: 0.0,
            lp_residual: 0.0,
        };
        let a = emit_report(&report);
        let b = emit_report(&report);
        assert_eq!(a, b);
        // Keys of the top-level object come out sorted.
        let cmd = a.find("\"command\"").unwrap();
        let fcr = a.find("\"flux_class_residual\"").unwrap();
        let schema = a.find("\"schema\"").unwrap();
        assert!(cmd < fcr && fcr < schema);
    }

    #[test]
    fn reports_round_trip_through_json() {
        let report = RobustnessJson {
            schema: SCHEMA.into(),
            command: "robustness".into(),
            kind: "acr".into(),
            flux_source: "kinetic".into(),
            species: vec!["A".into(), "B".into()],
            flux_dim: 1,
            parameter_dim: 1,
            parameter_basis: vec![rat_vec(&[rat(1, 1), rat(-1, 2)])],
            robust_species: vec![],
            zero_coordinate_table: [("A".to_string(), false), ("B".to_string(), false)]
                .into_iter()
                .collect(),
            bound: 1,
            conservativity: Some(ConservativityJson {
                conservative: true,
                positive_witness: Some(rat_vec(&[rat(1, 1), rat(1, 1)])),
                consistent: true,
                conclusion: "conservative-no-robustness".into(),
            }),
        };
        let text = emit_report(&report);
        let parsed: RobustnessJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, report);
    }
}
