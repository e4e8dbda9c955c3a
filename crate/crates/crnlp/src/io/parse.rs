//! Text format for networks, kinetics, decompositions, payoff systems, and
//! LP declarations.
//!
//! ```text
//! # comments run to end of line
//! species: M1, M2, M3, M4, M5, M6
//!
//! reactions:
//! r1: M5 -> M1            # term = [coeff] NAME; coeff decimal or p/q
//! r2: 2 M1 + M2 -> 0.5 M3 # `0` denotes the empty complex
//!
//! kinetics:
//! r1: M5^1                # single power-law monomial
//! r2: 2 * M1^0.5 + M2^1   # poly rates: coefficient * monomial + ...
//! # or the single line `mass_action`
//!
//! rates:
//! r1 = 1.5
//!
//! decomposition:
//! N1: r1, r2
//!
//! payoff:
//! m = 2
//! terms = 1
//! f1: X2^1
//! f2: X1^1
//!
//! reference_point: 1, 1, 1, 1, 1, 1
//!
//! flux_subspace:
//! v1: 1, 0, 0, 0, -1, 0
//! ```
//!
//! Decimals are stored as exact fractions (`0.36` is `9/25`). Every error
//! carries a line and column.

use crate::kinetics::{Kinetics, PolyPlKinetics, PowerLawKinetics};
use crate::linalg::Matrix;
use crate::network::{Complex, Network};
use crate::rational::{all_positive, parse_rat, rat_int, Rat};
use crate::replicator::PayoffSystem;
use num::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Everything a file can declare. The network is absent for pure payoff
/// files; kinetics, decomposition, and LP declarations are optional.
#[derive(Debug, Clone)]
pub struct Document {
    pub species: Vec<String>,
    pub network: Option<Network>,
    pub kinetics: Option<Kinetics>,
    /// Block names with parent reaction indices, in file order.
    pub decomposition: Option<Vec<(String, Vec<usize>)>>,
    pub payoff: Option<PayoffSystem>,
    pub reference_point: Option<Vec<Rat>>,
    /// Rows of a user-declared flux subspace basis.
    pub declared_flux: Option<Vec<Vec<Rat>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Ident,
    Number,
    Plus,
    Star,
    Caret,
    Arrow,
    Comma,
    Equals,
    Colon,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    text: String,
    col: usize,
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' => {
                toks.push(Tok { kind: TokKind::Plus, text: "+".into(), col });
                i += 1;
            }
            '*' => {
                toks.push(Tok { kind: TokKind::Star, text: "*".into(), col });
                i += 1;
            }
            '^' => {
                toks.push(Tok { kind: TokKind::Caret, text: "^".into(), col });
                i += 1;
            }
            ',' => {
                toks.push(Tok { kind: TokKind::Comma, text: ",".into(), col });
                i += 1;
            }
            '=' => {
                toks.push(Tok { kind: TokKind::Equals, text: "=".into(), col });
                i += 1;
            }
            ':' => {
                toks.push(Tok { kind: TokKind::Colon, text: ":".into(), col });
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    toks.push(Tok { kind: TokKind::Arrow, text: "->".into(), col });
                    i += 2;
                } else if i + 1 < bytes.len()
                    && ((bytes[i + 1] as char).is_ascii_digit() || bytes[i + 1] == b'.')
                {
                    let (text, next) = lex_number(line, i + 1);
                    toks.push(Tok {
                        kind: TokKind::Number,
                        text: format!("-{text}"),
                        col,
                    });
                    i = next;
                } else {
                    return Err(ParseError::new(
                        line_no,
                        col,
                        "expected `->` or a negative number after `-`",
                    ));
                }
            }
            c if c.is_ascii_digit() || c == '.' => {
                let (text, next) = lex_number(line, i);
                toks.push(Tok { kind: TokKind::Number, text, col });
                i = next;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Tok {
                    kind: TokKind::Ident,
                    text: line[start..i].to_string(),
                    col,
                });
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(toks)
}

/// Consumes digits with an optional decimal point or `/denominator`.
fn lex_number(line: &str, start: usize) -> (String, usize) {
    let bytes = line.as_bytes();
    let mut i = start;
    while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
        i += 1;
    }
    if i < bytes.len()
        && bytes[i] == b'/'
        && i + 1 < bytes.len()
        && (bytes[i + 1] as char).is_ascii_digit()
    {
        i += 1;
        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
            i += 1;
        }
    }
    (line[start..i].to_string(), i)
}

fn number(tok: &Tok, line: usize) -> Result<Rat, ParseError> {
    parse_rat(&tok.text).map_err(|e| ParseError::new(line, tok.col, e.to_string()))
}

const SECTIONS: &[&str] = &[
    "species",
    "reactions",
    "kinetics",
    "rates",
    "decomposition",
    "payoff",
    "reference_point",
    "flux_subspace",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Species,
    Reactions,
    Kinetics,
    Rates,
    Decomposition,
    Payoff,
    FluxSubspace,
}

#[derive(Debug)]
struct RawReaction {
    label: String,
    line: usize,
    reactant: Vec<(Rat, String)>,
    product: Vec<(Rat, String)>,
}

/// A parsed sum of monomials: `(coefficient, factors)` with each factor a
/// `(species name, exponent)` pair.
type RawPoly = Vec<(Rat, Vec<(String, Rat)>)>;
/// A labeled poly with its source line.
type RawPolyLine = (String, usize, RawPoly);

#[derive(Debug)]
enum RawKinetics {
    MassAction { line: usize },
    Lines(Vec<RawPolyLine>),
}

/// Parses a document; the grammar is total: every input produces either a
/// validated [`Document`] or a positioned error.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut section: Option<Section> = None;
    let mut species: Option<(Vec<String>, usize)> = None;
    let mut reactions: Vec<RawReaction> = Vec::new();
    let mut kinetics: Option<RawKinetics> = None;
    let mut rates: Vec<(String, usize, Rat)> = Vec::new();
    let mut decomposition: Vec<(String, usize, Vec<String>)> = Vec::new();
    let mut payoff_m: Option<(usize, usize)> = None;
    let mut payoff_terms: Option<(usize, usize)> = None;
    let mut payoff_lines: Vec<RawPolyLine> = Vec::new();
    let mut reference_point: Option<(Vec<Rat>, usize)> = None;
    let mut declared_flux: Vec<(usize, Vec<Rat>)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex_line(raw_line, line_no)?;
        if toks.is_empty() {
            continue;
        }

        // Section headers: a known keyword followed by `:` at line start.
        if toks[0].kind == TokKind::Ident
            && SECTIONS.contains(&toks[0].text.as_str())
            && toks.len() >= 2
            && toks[1].kind == TokKind::Colon
        {
            let rest = &toks[2..];
            match toks[0].text.as_str() {
                "species" => {
                    if species.is_some() {
                        return Err(ParseError::new(line_no, toks[0].col, "duplicate species section"));
                    }
                    species = Some((parse_ident_list(rest, line_no)?, line_no));
                    section = Some(Section::Species);
                }
                "reference_point" => {
                    if reference_point.is_some() {
                        return Err(ParseError::new(
                            line_no,
                            toks[0].col,
                            "duplicate reference_point",
                        ));
                    }
                    reference_point = Some((parse_number_list(rest, line_no)?, line_no));
                    section = Some(Section::Species); // consumes its own line only
                }
                name => {
                    if !rest.is_empty() {
                        return Err(ParseError::new(
                            line_no,
                            rest[0].col,
                            format!("unexpected content after `{name}:`"),
                        ));
                    }
                    section = Some(match name {
                        "reactions" => Section::Reactions,
                        "kinetics" => Section::Kinetics,
                        "rates" => Section::Rates,
                        "decomposition" => Section::Decomposition,
                        "payoff" => Section::Payoff,
                        "flux_subspace" => Section::FluxSubspace,
                        _ => unreachable!(),
                    });
                    if name == "kinetics" && kinetics.is_none() {
                        kinetics = Some(RawKinetics::Lines(Vec::new()));
                    }
                }
            }
            continue;
        }

        match section {
            None | Some(Section::Species) => {
                return Err(ParseError::new(
                    line_no,
                    toks[0].col,
                    "expected a section header such as `reactions:`",
                ));
            }
            Some(Section::Reactions) => {
                reactions.push(parse_reaction_line(&toks, line_no)?);
            }
            Some(Section::Kinetics) => {
                if toks.len() == 1 && toks[0].kind == TokKind::Ident && toks[0].text == "mass_action"
                {
                    match &kinetics {
                        Some(RawKinetics::Lines(lines)) if lines.is_empty() => {
                            kinetics = Some(RawKinetics::MassAction { line: line_no });
                        }
                        _ => {
                            return Err(ParseError::new(
                                line_no,
                                toks[0].col,
                                "`mass_action` cannot be mixed with explicit kinetics lines",
                            ));
                        }
                    }
                    continue;
                }
                let (label, rest_start) = expect_label(&toks, line_no)?;
                let poly = parse_poly(&toks[rest_start..], line_no)?;
                match &mut kinetics {
                    Some(RawKinetics::Lines(lines)) => lines.push((label, line_no, poly)),
                    _ => {
                        return Err(ParseError::new(
                            line_no,
                            toks[0].col,
                            "`mass_action` cannot be mixed with explicit kinetics lines",
                        ));
                    }
                }
            }
            Some(Section::Rates) => {
                let (label, value) = parse_assignment(&toks, line_no)?;
                rates.push((label, line_no, value));
            }
            Some(Section::Decomposition) => {
                let (name, rest_start) = expect_label(&toks, line_no)?;
                let labels = parse_ident_list(&toks[rest_start..], line_no)?;
                decomposition.push((name, line_no, labels));
            }
            Some(Section::Payoff) => {
                if toks.len() >= 2 && toks[1].kind == TokKind::Equals {
                    let (key, value) = parse_assignment(&toks, line_no)?;
                    let as_count = value
                        .denom()
                        .is_one()
                        .then(|| value.numer().clone())
                        .and_then(|n| usize::try_from(n).ok())
                        .ok_or_else(|| {
                            ParseError::new(line_no, toks[2].col, "expected a nonnegative integer")
                        })?;
                    match key.as_str() {
                        "m" => payoff_m = Some((as_count, line_no)),
                        "terms" => payoff_terms = Some((as_count, line_no)),
                        other => {
                            return Err(ParseError::new(
                                line_no,
                                toks[0].col,
                                format!("unknown payoff key `{other}` (expected `m` or `terms`)"),
                            ));
                        }
                    }
                } else {
                    let (label, rest_start) = expect_label(&toks, line_no)?;
                    let poly = parse_poly(&toks[rest_start..], line_no)?;
                    payoff_lines.push((label, line_no, poly));
                }
            }
            Some(Section::FluxSubspace) => {
                let (_, rest_start) = expect_label(&toks, line_no)?;
                declared_flux.push((line_no, parse_number_list(&toks[rest_start..], line_no)?));
            }
        }
    }

    assemble(
        species,
        reactions,
        kinetics,
        rates,
        decomposition,
        payoff_m,
        payoff_terms,
        payoff_lines,
        reference_point,
        declared_flux,
    )
}

fn expect_label(toks: &[Tok], line: usize) -> Result<(String, usize), ParseError> {
    match toks {
        [first, second, ..] if first.kind == TokKind::Ident && second.kind == TokKind::Colon => {
            Ok((first.text.clone(), 2))
        }
        [first, ..] => Err(ParseError::new(line, first.col, "expected `LABEL:`")),
        [] => Err(ParseError::new(line, 1, "expected `LABEL:`")),
    }
}

fn parse_ident_list(toks: &[Tok], line: usize) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    let mut expect_ident = true;
    for tok in toks {
        if expect_ident {
            if tok.kind != TokKind::Ident {
                return Err(ParseError::new(line, tok.col, "expected a name"));
            }
            out.push(tok.text.clone());
        } else if tok.kind != TokKind::Comma {
            return Err(ParseError::new(line, tok.col, "expected `,`"));
        }
        expect_ident = !expect_ident;
    }
    if expect_ident {
        let col = toks.last().map_or(1, |t| t.col);
        return Err(ParseError::new(line, col, "trailing `,` or empty list"));
    }
    Ok(out)
}

fn parse_number_list(toks: &[Tok], line: usize) -> Result<Vec<Rat>, ParseError> {
    let mut out = Vec::new();
    let mut expect_number = true;
    for tok in toks {
        if expect_number {
            if tok.kind != TokKind::Number {
                return Err(ParseError::new(line, tok.col, "expected a number"));
            }
            out.push(number(tok, line)?);
        } else if tok.kind != TokKind::Comma {
            return Err(ParseError::new(line, tok.col, "expected `,`"));
        }
        expect_number = !expect_number;
    }
    if expect_number {
        let col = toks.last().map_or(1, |t| t.col);
        return Err(ParseError::new(line, col, "trailing `,` or empty list"));
    }
    Ok(out)
}

fn parse_assignment(toks: &[Tok], line: usize) -> Result<(String, Rat), ParseError> {
    match toks {
        [key, eq, value]
            if key.kind == TokKind::Ident
                && eq.kind == TokKind::Equals
                && value.kind == TokKind::Number =>
        {
            Ok((key.text.clone(), number(value, line)?))
        }
        _ => {
            let col = toks.first().map_or(1, |t| t.col);
            Err(ParseError::new(line, col, "expected `NAME = number`"))
        }
    }
}

fn parse_reaction_line(toks: &[Tok], line: usize) -> Result<RawReaction, ParseError> {
    let (label, rest_start) = expect_label(toks, line)?;
    let rest = &toks[rest_start..];
    let arrow = rest
        .iter()
        .position(|t| t.kind == TokKind::Arrow)
        .ok_or_else(|| {
            let col = rest.first().map_or(1, |t| t.col);
            ParseError::new(line, col, "reaction needs `->`")
        })?;
    let reactant = parse_side(&rest[..arrow], line, rest.first().map_or(1, |t| t.col))?;
    let product = parse_side(&rest[arrow + 1..], line, rest[arrow].col + 2)?;
    Ok(RawReaction {
        label,
        line,
        reactant,
        product,
    })
}

/// A reaction side: `0` for the empty complex, else `[coeff] NAME (+ ...)*`.
fn parse_side(toks: &[Tok], line: usize, start_col: usize) -> Result<Vec<(Rat, String)>, ParseError> {
    if toks.is_empty() {
        return Err(ParseError::new(line, start_col, "empty reaction side"));
    }
    if toks.len() == 1 && toks[0].kind == TokKind::Number && toks[0].text == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for group in toks.split(|t| t.kind == TokKind::Plus) {
        match group {
            [name] if name.kind == TokKind::Ident => {
                out.push((rat_int(1), name.text.clone()));
            }
            [coeff, name] if coeff.kind == TokKind::Number && name.kind == TokKind::Ident => {
                out.push((number(coeff, line)?, name.text.clone()));
            }
            [] => {
                return Err(ParseError::new(line, start_col, "empty term between `+`"));
            }
            _ => {
                return Err(ParseError::new(
                    line,
                    group[0].col,
                    "expected `[coefficient] SPECIES`",
                ));
            }
        }
    }
    Ok(out)
}

/// `coeff * NAME^e * NAME^e + ...`; a bare number is a constant term and a
/// bare monomial has coefficient one.
fn parse_poly(toks: &[Tok], line: usize) -> Result<RawPoly, ParseError> {
    if toks.is_empty() {
        return Err(ParseError::new(line, 1, "empty rate expression"));
    }
    let mut terms = Vec::new();
    for group in toks.split(|t| t.kind == TokKind::Plus) {
        if group.is_empty() {
            return Err(ParseError::new(line, 1, "empty term between `+`"));
        }
        let mut coeff = rat_int(1);
        let mut factors = Vec::new();
        for (pos, item) in group.split(|t| t.kind == TokKind::Star).enumerate() {
            match item {
                [tok] if tok.kind == TokKind::Number => {
                    if pos != 0 {
                        return Err(ParseError::new(
                            line,
                            tok.col,
                            "a coefficient may only lead a term",
                        ));
                    }
                    coeff = number(tok, line)?;
                }
                [name] if name.kind == TokKind::Ident => {
                    factors.push((name.text.clone(), rat_int(1)));
                }
                [name, caret, exp]
                    if name.kind == TokKind::Ident
                        && caret.kind == TokKind::Caret
                        && exp.kind == TokKind::Number =>
                {
                    factors.push((name.text.clone(), number(exp, line)?));
                }
                [] => {
                    return Err(ParseError::new(line, group[0].col, "empty factor between `*`"));
                }
                other => {
                    return Err(ParseError::new(
                        line,
                        other[0].col,
                        "expected `NAME`, `NAME^exponent`, or a leading coefficient",
                    ));
                }
            }
        }
        terms.push((coeff, factors));
    }
    Ok(terms)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    species: Option<(Vec<String>, usize)>,
    reactions: Vec<RawReaction>,
    kinetics: Option<RawKinetics>,
    rates: Vec<(String, usize, Rat)>,
    decomposition: Vec<(String, usize, Vec<String>)>,
    payoff_m: Option<(usize, usize)>,
    payoff_terms: Option<(usize, usize)>,
    payoff_lines: Vec<RawPolyLine>,
    reference_point: Option<(Vec<Rat>, usize)>,
    declared_flux: Vec<(usize, Vec<Rat>)>,
) -> Result<Document, ParseError> {
    let (species, species_line) = species
        .ok_or_else(|| ParseError::new(1, 1, "file has no `species:` section"))?;
    if species.is_empty() {
        return Err(ParseError::new(species_line, 1, "species list is empty"));
    }
    let index_of: BTreeMap<&str, usize> = species
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    if index_of.len() != species.len() {
        return Err(ParseError::new(species_line, 1, "duplicate species name"));
    }
    let m = species.len();

    let lookup = |name: &str, line: usize, col: usize| -> Result<usize, ParseError> {
        index_of
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::new(line, col, format!("unknown species `{name}`")))
    };

    // Network.
    let mut network = None;
    let mut label_index: BTreeMap<String, usize> = BTreeMap::new();
    if !reactions.is_empty() {
        let mut triples = Vec::with_capacity(reactions.len());
        for (i, raw) in reactions.iter().enumerate() {
            if label_index.insert(raw.label.clone(), i).is_some() {
                return Err(ParseError::new(
                    raw.line,
                    1,
                    format!("duplicate reaction label `{}`", raw.label),
                ));
            }
            let build = |pairs: &[(Rat, String)]| -> Result<Complex, ParseError> {
                let indexed = pairs
                    .iter()
                    .map(|(c, name)| Ok((lookup(name, raw.line, 1)?, c.clone())))
                    .collect::<Result<Vec<_>, ParseError>>()?;
                Complex::new(indexed)
                    .map_err(|e| ParseError::new(raw.line, 1, e))
            };
            triples.push((raw.label.clone(), build(&raw.reactant)?, build(&raw.product)?));
        }
        let net = Network::new(species.clone(), triples).map_err(|e| {
            let line = reactions.first().map_or(1, |r| r.line);
            ParseError::new(line, 1, e.to_string())
        })?;
        network = Some(net);
    }

    // Rates keyed by reaction label.
    let mut rate_of: BTreeMap<usize, Rat> = BTreeMap::new();
    for (label, line, value) in &rates {
        let idx = *label_index.get(label).ok_or_else(|| {
            ParseError::new(*line, 1, format!("rate for unknown reaction `{label}`"))
        })?;
        if rate_of.insert(idx, value.clone()).is_some() {
            return Err(ParseError::new(*line, 1, format!("duplicate rate for `{label}`")));
        }
        if !num::Signed::is_positive(value) {
            return Err(ParseError::new(*line, 1, "rate constants must be positive"));
        }
    }

    // Kinetics.
    let kinetics = match kinetics {
        None => {
            if let Some((_, line, _)) = rates.first() {
                if network.is_none() {
                    return Err(ParseError::new(*line, 1, "rates without reactions"));
                }
            }
            None
        }
        Some(RawKinetics::MassAction { line }) => {
            let net = network.as_ref().ok_or_else(|| {
                ParseError::new(line, 1, "`mass_action` requires a reactions section")
            })?;
            let base = PowerLawKinetics::mass_action(net);
            Some(Kinetics::PowerLaw(apply_rates_pl(
                base, &rate_of, net.reaction_count(), line,
            )?))
        }
        Some(RawKinetics::Lines(lines)) => {
            let net = network.as_ref().ok_or_else(|| {
                let line = lines.first().map_or(1, |l| l.1);
                ParseError::new(line, 1, "kinetics requires a reactions section")
            })?;
            // Per reaction: source line plus (coefficient, exponent row) terms.
            type ReactionTerms = (usize, Vec<(Rat, Vec<Rat>)>);
            let r = net.reaction_count();
            let mut per_reaction: Vec<Option<ReactionTerms>> = vec![None; r];
            for (label, line, poly) in &lines {
                let idx = *label_index.get(label).ok_or_else(|| {
                    ParseError::new(*line, 1, format!("kinetics for unknown reaction `{label}`"))
                })?;
                if per_reaction[idx].is_some() {
                    return Err(ParseError::new(
                        *line,
                        1,
                        format!("duplicate kinetics for `{label}`"),
                    ));
                }
                let terms = poly
                    .iter()
                    .map(|(coeff, factors)| {
                        let mut row = vec![Rat::zero(); m];
                        for (name, exp) in factors {
                            let s = lookup(name, *line, 1)?;
                            row[s] += exp.clone();
                        }
                        Ok((coeff.clone(), row))
                    })
                    .collect::<Result<Vec<_>, ParseError>>()?;
                per_reaction[idx] = Some((*line, terms));
            }
            if let Some(missing) = per_reaction.iter().position(Option::is_none) {
                return Err(ParseError::new(
                    lines.last().map_or(1, |l| l.1),
                    1,
                    format!(
                        "no kinetics line for reaction `{}`",
                        net.reaction_label(missing)
                    ),
                ));
            }
            let per_reaction: Vec<ReactionTerms> =
                per_reaction.into_iter().map(Option::unwrap).collect();

            if per_reaction.iter().all(|(_, terms)| terms.len() == 1) {
                // Single monomials: plain power-law kinetics. A non-unit
                // coefficient folds into the rate constant, which then must
                // not also come from the rates section.
                let mut rows = Vec::with_capacity(r);
                let mut rates_vec = Vec::with_capacity(r);
                for (idx, (line, terms)) in per_reaction.iter().enumerate() {
                    let (coeff, row) = &terms[0];
                    if !num::Signed::is_positive(coeff) {
                        return Err(ParseError::new(
                            *line,
                            1,
                            "a single-term rate needs a positive coefficient",
                        ));
                    }
                    rows.push(row.clone());
                    let k = rate_of.get(&idx).cloned().unwrap_or_else(|| rat_int(1));
                    rates_vec.push(k * coeff);
                }
                let has_rates = !rate_of.is_empty()
                    || per_reaction.iter().any(|(_, t)| !t[0].0.is_one());
                let base = PowerLawKinetics::new(Matrix::from_rows(m, rows), None)
                    .expect("validated dimensions");
                let kin = if has_rates {
                    base.with_rates(rates_vec)
                        .map_err(|e| ParseError::new(species_line, 1, e.to_string()))?
                } else {
                    base
                };
                Some(Kinetics::PowerLaw(kin))
            } else {
                let poly_reactions = per_reaction
                    .iter()
                    .enumerate()
                    .map(|(idx, (_, terms))| {
                        let k = rate_of.get(&idx).cloned().unwrap_or_else(|| rat_int(1));
                        (k, terms.clone())
                    })
                    .collect();
                let poly = PolyPlKinetics::new(m, poly_reactions).map_err(|e| {
                    let line = lines.first().map_or(1, |l| l.1);
                    ParseError::new(line, 1, e.to_string())
                })?;
                Some(Kinetics::PolyPl(poly))
            }
        }
    };

    // Decomposition blocks.
    let decomposition = if decomposition.is_empty() {
        None
    } else {
        let mut blocks = Vec::with_capacity(decomposition.len());
        for (name, line, labels) in &decomposition {
            let indices = labels
                .iter()
                .map(|l| {
                    label_index.get(l).copied().ok_or_else(|| {
                        ParseError::new(*line, 1, format!("unknown reaction `{l}` in block `{name}`"))
                    })
                })
                .collect::<Result<Vec<_>, ParseError>>()?;
            blocks.push((name.clone(), indices));
        }
        Some(blocks)
    };

    // Payoff system.
    let payoff = if payoff_lines.is_empty() && payoff_m.is_none() && payoff_terms.is_none() {
        None
    } else {
        let (m_declared, m_line) =
            payoff_m.ok_or_else(|| ParseError::new(1, 1, "payoff section needs `m = ...`"))?;
        let (h, h_line) = payoff_terms
            .ok_or_else(|| ParseError::new(m_line, 1, "payoff section needs `terms = ...`"))?;
        if m_declared != m {
            return Err(ParseError::new(
                m_line,
                1,
                format!("payoff declares m = {m_declared}, but the file has {m} species"),
            ));
        }
        if payoff_lines.len() != m {
            let line = payoff_lines.last().map_or(h_line, |l| l.1);
            return Err(ParseError::new(
                line,
                1,
                format!("expected {m} payoff functions, found {}", payoff_lines.len()),
            ));
        }
        let mut payoffs = Vec::with_capacity(m);
        for (_, line, poly) in &payoff_lines {
            if poly.len() != h {
                return Err(ParseError::new(
                    *line,
                    1,
                    format!("payoff has {} terms, `terms = {h}` declared", poly.len()),
                ));
            }
            let terms = poly
                .iter()
                .map(|(coeff, factors)| {
                    let mut row = vec![Rat::zero(); m];
                    for (name, exp) in factors {
                        let s = lookup(name, *line, 1)?;
                        row[s] += exp.clone();
                    }
                    Ok((coeff.clone(), row))
                })
                .collect::<Result<Vec<_>, ParseError>>()?;
            payoffs.push(terms);
        }
        Some(
            PayoffSystem::new(species.clone(), payoffs)
                .map_err(|e| ParseError::new(payoff_lines[0].1, 1, e.to_string()))?,
        )
    };

    // Reference point.
    let reference_point = match reference_point {
        None => None,
        Some((values, line)) => {
            if values.len() != m {
                return Err(ParseError::new(
                    line,
                    1,
                    format!("reference point has {} entries, expected {m}", values.len()),
                ));
            }
            if !all_positive(&values) {
                return Err(ParseError::new(line, 1, "reference point must be strictly positive"));
            }
            Some(values)
        }
    };

    // Declared flux rows.
    let declared_flux = if declared_flux.is_empty() {
        None
    } else {
        let rows = declared_flux
            .into_iter()
            .map(|(line, row)| {
                if row.len() != m {
                    return Err(ParseError::new(
                        line,
                        1,
                        format!("flux row has {} entries, expected {m}", row.len()),
                    ));
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        Some(rows)
    };

    Ok(Document {
        species,
        network,
        kinetics,
        decomposition,
        payoff,
        reference_point,
        declared_flux,
    })
}

fn apply_rates_pl(
    base: PowerLawKinetics,
    rate_of: &BTreeMap<usize, Rat>,
    r: usize,
    line: usize,
) -> Result<PowerLawKinetics, ParseError> {
    if rate_of.is_empty() {
        return Ok(base);
    }
    let rates = (0..r)
        .map(|i| rate_of.get(&i).cloned().unwrap_or_else(|| rat_int(1)))
        .collect();
    base.with_rates(rates)
        .map_err(|e| ParseError::new(line, 1, e.to_string()))
}
