//! Command-line driver.
//!
//! Every subcommand reads one file, prints a JSON report on stdout, and
//! optionally a human summary on stderr (`--verbose`). Exit codes: `0` on
//! success, `1` when an analysis precondition fails (a decomposition without
//! the required independence, non-reactant-determined kinetics where a
//! kinetic subspace is needed, a failed exponent condition, a solver that
//! did not converge), `2` for parse or validation errors.

use crate::decomposition::{
    block_kinetic_order_subspace, build_decomposition, building_blocks_acr, building_blocks_bcr,
    is_incidence_independent, is_independent, propagate_robustness, BlockCase,
    BuildingBlockOptions, Decomposition, DecompositionError, LpCertification,
};
use crate::io::{
    self, emit_report, parse_document, AnalyzeReport, BirchReport, BlockJson, BlocksReport,
    ConditionFailureJson, ConditionJson, ConservativityJson, DecomposeReport, Document,
    ErrorDetail, ErrorReport, FindingJson, ParseError, ReplicatorReport, RobustnessJson,
    SummandJson, SCHEMA,
};
use crate::kinetics::{
    classify, kinetic_order_subspace, kinetic_reactant_flux_subspace, KineticOrderClass,
    Kinetics, KineticsError, PowerLawKinetics,
};
use crate::linalg::SubspaceBasis;
use crate::network::Network;
use crate::rational::{parse_rat, rat_to_f64, Rat};
use crate::replicator::{uniqueness_report, ConditionReport, ConditionViolation, ReplicatorError};
use crate::robustness::{
    conservativity_diagnostics, robust_species, ConservativityConclusion, LpKind, LpSet,
    RobustKind,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "crnlp",
    version,
    about = "Structure and concentration-robustness analysis for reaction networks"
)]
struct Cli {
    /// Print a human-readable summary to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural report: counts, rank, deficiency, classification flags.
    Analyze { file: PathBuf },
    /// Robust species of the LP set built from the chosen flux subspace.
    Robustness {
        file: PathBuf,
        /// Label the result as ACR (positive equilibria) or BCR (complex
        /// balanced equilibria).
        #[arg(long, value_enum, default_value_t = KindArg::Acr)]
        kind: KindArg,
        /// Where the flux subspace comes from; never guessed.
        #[arg(long, value_enum)]
        flux: FluxArg,
    },
    /// Independence tests and per-block robustness of a decomposition.
    Decompose {
        file: PathBuf,
        /// Enforce the independence required for this robustness kind and
        /// propagate block findings to the whole network.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Per-block flux subspaces for the control report.
        #[arg(long, value_enum, default_value_t = BlockFluxArg::Kinetic)]
        flux: BlockFluxArg,
    },
    /// Building-block robustness findings over a decomposition.
    Blocks {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Acr)]
        kind: KindArg,
    },
    /// Replicator-game pipeline: exponent condition, summand checks,
    /// uniqueness of the positive equilibrium.
    Replicator { file: PathBuf },
    /// Birch point: the unique intersection of the file's LP set with the
    /// flux class through a given positive point.
    Birch {
        file: PathBuf,
        /// Comma-separated coordinates of the positive point.
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value_t = FluxArg::Declared)]
        flux: FluxArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Acr,
    Bcr,
}

impl KindArg {
    fn robust_kind(self) -> RobustKind {
        match self {
            KindArg::Acr => RobustKind::Acr,
            KindArg::Bcr => RobustKind::Bcr,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            KindArg::Acr => "acr",
            KindArg::Bcr => "bcr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FluxArg {
    /// Stoichiometric subspace (mass action LP case).
    Stoich,
    /// Kinetic order subspace, per decomposition block when one is declared.
    Kinetic,
    /// The basis declared in the file's `flux_subspace:` section.
    Declared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BlockFluxArg {
    Stoich,
    Kinetic,
}

/// Exit codes: validation/parse failures are `2`, analysis preconditions `1`.
#[derive(Debug)]
enum CliError {
    Parse(ParseError),
    Validation(String),
    Precondition(String),
    /// Precondition failure with a structured report of its own.
    ConditionFailed(Box<ConditionReport>, Vec<String>),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Precondition(_) | CliError::ConditionFailed(..) => 1,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<DecompositionError> for CliError {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::NotIndependent
            | DecompositionError::NotIncidenceIndependent
            | DecompositionError::WitnessRejected { .. } => CliError::Precondition(e.to_string()),
            DecompositionError::Kinetics(k) => k.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<KineticsError> for CliError {
    fn from(e: KineticsError) -> Self {
        match e {
            KineticsError::NotReactantDetermined(..) | KineticsError::NotCycleTerminal(_) => {
                CliError::Precondition(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/usage text.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };

    match dispatch(&cli.command) {
        Ok(output) => {
            print_stdout(&output.json);
            if cli.verbose {
                eprintln!("{}", output.summary);
            }
            0
        }
        Err(err) => {
            let (kind, message, line, col) = match &err {
                CliError::Parse(p) => ("parse", p.message.clone(), Some(p.line), Some(p.col)),
                CliError::Validation(m) => ("validation", m.clone(), None, None),
                CliError::Precondition(m) => ("precondition", m.clone(), None, None),
                CliError::ConditionFailed(report, species) => {
                    let json = emit_report(&ConditionOnlyReport {
                        schema: SCHEMA.into(),
                        command: "replicator".into(),
                        condition: condition_json(report, species),
                    });
                    print_stdout(&json);
                    eprintln!("error: the exponent condition fails; see report");
                    return err.exit_code();
                }
            };
            let report = ErrorReport {
                schema: SCHEMA.into(),
                error: ErrorDetail {
                    kind: kind.into(),
                    message: message.clone(),
                    line,
                    col,
                },
            };
            print_stdout(&emit_report(&report));
            eprintln!("error: {message}");
            err.exit_code()
        }
    }
}

/// Writes a line to stdout, swallowing broken pipes (e.g. `crnlp ... | head`).
fn print_stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

#[derive(Serialize)]
struct ConditionOnlyReport {
    schema: String,
    command: String,
    condition: ConditionJson,
}

struct Output {
    json: String,
    summary: String,
}

fn dispatch(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Analyze { file } => analyze(&load(file)?),
        Command::Robustness { file, kind, flux } => robustness(&load(file)?, *kind, *flux),
        Command::Decompose { file, kind, flux } => decompose(&load(file)?, *kind, *flux),
        Command::Blocks { file, kind } => blocks(&load(file)?, *kind),
        Command::Replicator { file } => replicator(&load(file)?),
        Command::Birch { file, point, flux } => birch(&load(file)?, point, *flux),
    }
}

fn load(path: &PathBuf) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_document(&text)?)
}

fn require_network(doc: &Document) -> Result<&Network, CliError> {
    doc.network
        .as_ref()
        .ok_or_else(|| CliError::Validation("file has no `reactions:` section".into()))
}

fn require_power_law(doc: &Document) -> Result<&PowerLawKinetics, CliError> {
    match &doc.kinetics {
        Some(Kinetics::PowerLaw(k)) => Ok(k),
        Some(Kinetics::PolyPl(_)) => Err(CliError::Validation(
            "this command needs single-monomial power-law kinetics".into(),
        )),
        None => Err(CliError::Validation("file has no `kinetics:` section".into())),
    }
}

fn names(net_species: &[String], indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&i| net_species[i].clone()).collect()
}

fn analyze(doc: &Document) -> Result<Output, CliError> {
    let net = require_network(doc)?;
    let report = net.structural_report();
    let json = AnalyzeReport {
        schema: SCHEMA.into(),
        command: "analyze".into(),
        species: net.species().to_vec(),
        complexes: io::complex_strings(net),
        reactions: net.reactions().iter().map(|r| r.label.clone()).collect(),
        m: report.species,
        n: report.complexes,
        n_r: report.reactant_complexes,
        r: report.reactions,
        linkage_classes: report.linkage_classes,
        strong_linkage_classes: report.strong_linkage_classes,
        terminal_strong_linkage_classes: report.terminal_strong_linkage_classes,
        rank: report.rank,
        deficiency: report.deficiency,
        weakly_reversible: report.weakly_reversible,
        t_minimal: report.t_minimal,
        point_terminal: report.point_terminal,
        cycle_terminal: report.cycle_terminal,
        conservative: report.conservative,
        conservation_witness: report
            .conservation_witness
            .as_ref()
            .map(|w| io::rat_vec(w)),
    };
    let summary = format!(
        "{} species, {} complexes, {} reactions; rank {}, deficiency {}; weakly reversible: {}",
        report.species,
        report.complexes,
        report.reactions,
        report.rank,
        report.deficiency,
        report.weakly_reversible
    );
    Ok(Output {
        json: emit_report(&json),
        summary,
    })
}

/// Resolves the flux subspace of the whole network from the chosen source.
fn resolve_flux(
    doc: &Document,
    net: &Network,
    flux: FluxArg,
) -> Result<(SubspaceBasis, &'static str), CliError> {
    match flux {
        FluxArg::Stoich => Ok((net.stoichiometric_subspace(), "stoichiometric")),
        FluxArg::Declared => {
            let rows = doc.declared_flux.as_ref().ok_or_else(|| {
                CliError::Validation("file has no `flux_subspace:` section".into())
            })?;
            Ok((
                SubspaceBasis::from_rows(net.species_count(), rows.clone()),
                "declared",
            ))
        }
        FluxArg::Kinetic => {
            let subspace = match (&doc.kinetics, &doc.decomposition) {
                (None, _) => {
                    return Err(CliError::Validation(
                        "file has no `kinetics:` section".into(),
                    ))
                }
                (Some(Kinetics::PowerLaw(kin)), Some(blocks)) => {
                    let d = build_decomposition(net, blocks.clone())?;
                    crate::decomposition::kinetic_flux_subspace(net, kin, &d)?
                }
                (Some(Kinetics::PowerLaw(kin)), None) => {
                    match classify(net, kin).map_err(CliError::from)? {
                        KineticOrderClass::ReactantDetermined => {}
                        KineticOrderClass::NonReactantDetermined => {
                            return Err(CliError::Precondition(
                                "kinetics is not reactant-determined; declare a decomposition into reactant-determined blocks".into(),
                            ))
                        }
                    }
                    if net.structural_report().cycle_terminal {
                        kinetic_order_subspace(net, kin)?
                    } else {
                        kinetic_reactant_flux_subspace(net, kin)?
                    }
                }
                (Some(Kinetics::PolyPl(poly)), None) => {
                    // Sum of the summands' kinetic order subspaces.
                    let canonical = poly.canonical();
                    let summands = canonical.pl_summands().map_err(CliError::from)?;
                    let subspaces = summands
                        .iter()
                        .map(|s| kinetic_order_subspace(net, s))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(CliError::from)?;
                    let refs: Vec<&SubspaceBasis> = subspaces.iter().collect();
                    SubspaceBasis::sum(&refs).expect("shared ambient dimension")
                }
                (Some(Kinetics::PolyPl(_)), Some(_)) => {
                    return Err(CliError::Precondition(
                        "kinetic flux of a decomposed poly-power-law system is not supported"
                            .into(),
                    ))
                }
            };
            Ok((subspace, "kinetic"))
        }
    }
}

fn robustness(doc: &Document, kind: KindArg, flux: FluxArg) -> Result<Output, CliError> {
    let net = require_network(doc)?;
    let (subspace, source) = resolve_flux(doc, net, flux)?;
    let report = robust_species(&subspace, kind.robust_kind());

    let conservativity = (flux == FluxArg::Stoich).then(|| {
        let diag = conservativity_diagnostics(net, &subspace);
        ConservativityJson {
            conservative: diag.conservative,
            positive_witness: diag.positive_witness.as_ref().map(|w| io::rat_vec(w)),
            consistent: diag.consistent,
            conclusion: match diag.conclusion {
                ConservativityConclusion::ConservativeNoRobustness => {
                    "conservative-no-robustness".into()
                }
                ConservativityConclusion::RobustHenceNonconservative => {
                    "robust-hence-nonconservative".into()
                }
                ConservativityConclusion::NoFinding => "no-finding".into(),
                ConservativityConclusion::Inconsistent => "inconsistent".into(),
            },
        }
    });

    // Parameter basis in free-variable form: each row keeps one coordinate
    // at one, the display elimination naturally produces.
    let parametrization = crate::linalg::kernel_parametrization(subspace.basis_matrix());

    let json = RobustnessJson {
        schema: SCHEMA.into(),
        command: "robustness".into(),
        kind: kind.as_str().into(),
        flux_source: source.into(),
        species: net.species().to_vec(),
        flux_dim: subspace.dim(),
        parameter_dim: report.parameter_basis.dim(),
        parameter_basis: parametrization.iter().map(|row| io::rat_vec(row)).collect(),
        robust_species: names(net.species(), &report.robust_species),
        zero_coordinate_table: net
            .species()
            .iter()
            .zip(&report.zero_columns)
            .map(|(s, &z)| (s.clone(), z))
            .collect(),
        bound: report.bound,
        conservativity,
    };
    let summary = format!(
        "flux source {source}, dim {}; robust species: {:?} (bound {})",
        subspace.dim(),
        names(net.species(), &report.robust_species),
        report.bound
    );
    Ok(Output {
        json: emit_report(&json),
        summary,
    })
}

fn require_decomposition(doc: &Document, net: &Network) -> Result<Decomposition, CliError> {
    let blocks = doc.decomposition.as_ref().ok_or_else(|| {
        CliError::Validation("file has no `decomposition:` section".into())
    })?;
    Ok(build_decomposition(net, blocks.clone())?)
}

fn decompose(doc: &Document, kind: Option<KindArg>, flux: BlockFluxArg) -> Result<Output, CliError> {
    let net = require_network(doc)?;
    let d = require_decomposition(doc, net)?;
    let independent = is_independent(net, &d);
    let incidence_independent = is_incidence_independent(net, &d);

    // Per-block flux subspaces; a block that does not support the chosen
    // flux stays uncontrolled instead of failing the whole report.
    let mut block_flux: BTreeMap<usize, SubspaceBasis> = BTreeMap::new();
    for (b, block) in d.blocks().iter().enumerate() {
        let subspace = match flux {
            BlockFluxArg::Stoich => Some(net.stoichiometric_subspace_of(&block.reactions)),
            BlockFluxArg::Kinetic => match &doc.kinetics {
                Some(Kinetics::PowerLaw(kin)) => {
                    block_kinetic_order_subspace(net, kin, &block.reactions).ok()
                }
                _ => None,
            },
        };
        if let Some(s) = subspace {
            block_flux.insert(b, s);
        }
    }
    let control = crate::decomposition::lp_control_report(net, &d, &block_flux);

    let propagated = match kind {
        None => None,
        Some(kind) => {
            let per_block: Vec<BTreeSet<usize>> = control
                .per_block
                .iter()
                .map(|c| {
                    c.robust_species
                        .as_ref()
                        .map(|v| v.iter().copied().collect())
                        .unwrap_or_default()
                })
                .collect();
            Some(propagate_robustness(net, &d, &per_block, kind.robust_kind())?)
        }
    };

    let blocks_json: Vec<BlockJson> = d
        .blocks()
        .iter()
        .zip(&control.per_block)
        .map(|(block, ctrl)| {
            let report = block.subnetwork.structural_report();
            BlockJson {
                name: block.name.clone(),
                reactions: block
                    .reactions
                    .iter()
                    .map(|&i| net.reaction_label(i).to_string())
                    .collect(),
                species: block.subnetwork.species().to_vec(),
                rank: report.rank,
                deficiency: report.deficiency,
                weakly_reversible: report.weakly_reversible,
                cycle_terminal: report.cycle_terminal,
                flux_dim: ctrl.flux_dim,
                robust_species: ctrl
                    .robust_species
                    .as_ref()
                    .map(|v| names(net.species(), v)),
            }
        })
        .collect();

    let json = DecomposeReport {
        schema: SCHEMA.into(),
        command: "decompose".into(),
        flux_source: match flux {
            BlockFluxArg::Stoich => "stoichiometric".into(),
            BlockFluxArg::Kinetic => "kinetic".into(),
        },
        blocks: blocks_json,
        independent,
        incidence_independent,
        fully_controlled: control.fully_controlled,
        kind: kind.map(|k| k.as_str().to_string()),
        propagated_robust_species: propagated
            .as_ref()
            .map(|set| names(net.species(), &set.iter().copied().collect::<Vec<_>>())),
    };
    let summary = format!(
        "{} blocks; independent: {independent}; incidence independent: {incidence_independent}",
        d.block_count()
    );
    Ok(Output {
        json: emit_report(&json),
        summary,
    })
}

fn blocks(doc: &Document, kind: KindArg) -> Result<Output, CliError> {
    let net = require_network(doc)?;
    let kin = require_power_law(doc)?;
    let d = require_decomposition(doc, net)?;
    let options = BuildingBlockOptions::default();
    let findings = match kind {
        KindArg::Acr => building_blocks_acr(net, kin, &d, &options)?,
        KindArg::Bcr => building_blocks_bcr(net, kin, &d, &options)?,
    };

    let findings_json: Vec<FindingJson> = findings
        .iter()
        .map(|f| FindingJson {
            block: d.blocks()[f.block].name.clone(),
            species: net.species()[f.species].clone(),
            case: match f.case {
                BlockCase::DeficiencyZeroWeaklyReversible => {
                    "deficiency-zero-weakly-reversible".into()
                }
                BlockCase::DeficiencyOneNonterminal => "deficiency-one-nonterminal".into(),
                BlockCase::CycleTerminalLp => "cycle-terminal-lp".into(),
            },
            sf_pair: vec![
                net.reaction_label(f.sf_pair.0).to_string(),
                net.reaction_label(f.sf_pair.1).to_string(),
            ],
            block_deficiency: f.block_deficiency,
            certification: f.certification.map(|c| {
                match c {
                    LpCertification::KineticDeficiencyZero => "kinetic-deficiency-zero",
                    LpCertification::TikLowDeficiency => "t-rank-maximal-low-deficiency",
                    LpCertification::UserAsserted => "user-asserted",
                }
                .to_string()
            }),
        })
        .collect();

    let json = BlocksReport {
        schema: SCHEMA.into(),
        command: "blocks".into(),
        kind: kind.as_str().into(),
        equilibrium: "asserted".into(),
        independent: is_independent(net, &d),
        incidence_independent: is_incidence_independent(net, &d),
        findings: findings_json,
    };
    let summary = format!("{} finding(s)", findings.len());
    Ok(Output {
        json: emit_report(&json),
        summary,
    })
}

fn condition_json(report: &ConditionReport, species: &[String]) -> ConditionJson {
    ConditionJson {
        holds: report.holds,
        vacuous: report.vacuous,
        failures: report
            .failures
            .iter()
            .map(|f| ConditionFailureJson {
                term: f.term + 1,
                species: species[f.species].clone(),
                reason: match &f.violation {
                    ConditionViolation::NotSingleton { values } => format!(
                        "off-diagonal exponents disagree: {}",
                        values
                            .iter()
                            .map(crate::rational::rat_display)
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                    ConditionViolation::EqualsDiagonal { value } => format!(
                        "off-diagonal exponent {} equals the diagonal one",
                        crate::rational::rat_display(value)
                    ),
                },
            })
            .collect(),
    }
}

fn replicator(doc: &Document) -> Result<Output, CliError> {
    let payoffs = doc
        .payoff
        .as_ref()
        .ok_or_else(|| CliError::Validation("file has no `payoff:` section".into()))?;
    let report = match uniqueness_report(payoffs) {
        Ok(r) => r,
        Err(ReplicatorError::ConditionFailed(condition)) => {
            return Err(CliError::ConditionFailed(
                Box::new(condition),
                payoffs.species().to_vec(),
            ));
        }
        Err(other) => return Err(CliError::Validation(other.to_string())),
    };

    let json = ReplicatorReport {
        schema: SCHEMA.into(),
        command: "replicator".into(),
        species: payoffs.species().to_vec(),
        term_count: payoffs.term_count(),
        condition: condition_json(&report.condition, payoffs.species()),
        complexes: report.structural.complexes,
        linkage_classes: report.structural.linkage_classes,
        deficiency: report.structural.deficiency,
        weakly_reversible: report.structural.weakly_reversible,
        summands: report
            .summands
            .iter()
            .map(|s| SummandJson {
                index: s.index,
                t_rank_maximal: s.t_rank_maximal,
                kinetic_order_dim: s.kinetic_order_dim,
                kinetic_deficiency: s.kinetic_deficiency,
            })
            .collect(),
        parameter_dim: report.parameter_dim,
        robust_species: names(payoffs.species(), &report.robustness.robust_species),
        unique_positive_equilibrium: report.unique_positive_equilibrium,
    };
    let summary = format!(
        "unique positive equilibrium: {}; robust species: {:?}",
        report.unique_positive_equilibrium,
        names(payoffs.species(), &report.robustness.robust_species)
    );
    Ok(Output {
        json: emit_report(&json),
        summary,
    })
}

fn birch(doc: &Document, point: &str, flux: FluxArg) -> Result<Output, CliError> {
    let net = require_network(doc)?;
    let (subspace, _) = resolve_flux(doc, net, flux)?;
    let reference: Vec<Rat> = doc
        .reference_point
        .clone()
        .ok_or_else(|| CliError::Validation("file has no `reference_point:` declaration".into()))?;
    let q: Vec<f64> = point
        .split(',')
        .map(|s| parse_rat(s.trim()).map(|r| rat_to_f64(&r)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Validation(format!("bad --point: {e}")))?;

    let lp = LpSet::new(LpKind::Generic, subspace, reference)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let result = lp
        .birch_point(&q)
        .map_err(|e| CliError::Precondition(e.to_string()))?;

    let json = BirchReport {
        schema: SCHEMA.into(),
        command: "birch".into(),
        point: result.point.clone(),
        iterations: result.iterations,
        flux_class_residual: result.flux_class_residual,
        lp_residual: result.lp_residual,
    };
    let summary = format!(
        "Birch point {:?} after {} iterations",
        result.point, result.iterations
    );
    Ok(Output {
        json: emit_report(&json),
        summary,
    })
}
