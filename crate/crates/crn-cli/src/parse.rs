//! The `.crn` text format: one reaction per line, `->` or `<->` arrows,
//! integer or `p/q` coefficients, `#` comments, and `@` annotation lines for
//! partitions, rate constants, initial values and analysis assumptions.

use std::collections::BTreeMap;
use std::fmt;

use crn_core::network::{build_network, RawReaction, ReactionNetwork};
use crn_core::ptm::{CascadeSpec, PTMPartition};
use crn_core::rational::{parse_rational, rat, Rational};
use crn_core::Error as CoreError;

use num::Signed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: expected {}",
            self.line, self.col, self.expected
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug)]
pub enum DocumentError {
    Parse(ParseError),
    Network(CoreError),
    UnknownSpeciesInAnnotation(String),
    NegativeOrZeroCoefficient(String),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Parse(e) => write!(f, "parse error: {e}"),
            DocumentError::Network(e) => write!(f, "invalid network: {e}"),
            DocumentError::UnknownSpeciesInAnnotation(s) => {
                write!(f, "annotation references unknown species {s}")
            }
            DocumentError::NegativeOrZeroCoefficient(s) => {
                write!(f, "coefficient must be a positive rational: {s}")
            }
        }
    }
}

impl std::error::Error for DocumentError {}

impl From<ParseError> for DocumentError {
    fn from(e: ParseError) -> Self {
        DocumentError::Parse(e)
    }
}

impl From<CoreError> for DocumentError {
    fn from(e: CoreError) -> Self {
        DocumentError::Network(e)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LayerAnnotation {
    pub enz: Vec<String>,
    pub sub: Vec<String>,
    pub int: Vec<String>,
}

/// A parsed `.crn` file: reversible arrows already expanded, annotations
/// collected but not yet resolved against the species set.
#[derive(Debug, Clone, Default)]
pub struct NetworkDocument {
    pub reactions: Vec<RawReaction>,
    pub intermediates: Option<Vec<String>>,
    pub catalysts: Option<Vec<String>>,
    pub layers: BTreeMap<u32, LayerAnnotation>,
    /// 1-based expanded reaction index -> rate constant.
    pub rates: BTreeMap<usize, Rational>,
    pub inits: BTreeMap<String, Rational>,
    pub assume_dissipative: bool,
}

pub fn parse(text: &str) -> Result<NetworkDocument, DocumentError> {
    let mut doc = NetworkDocument::default();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line_number = lineno + 1;
        let line = strip_comment(raw_line);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('@') {
            parse_annotation(trimmed, line_number, &mut doc)?;
            continue;
        }
        parse_reaction_line(line, line_number, &mut doc)?;
    }
    Ok(doc)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

fn parse_annotation(
    line: &str,
    lineno: usize,
    doc: &mut NetworkDocument,
) -> Result<(), DocumentError> {
    let mut words = line.split_whitespace();
    let head = words.next().unwrap_or("");
    match head {
        "@intermediates" => {
            doc.intermediates = Some(words.map(str::to_string).collect());
            Ok(())
        }
        "@catalysts" => {
            doc.catalysts = Some(words.map(str::to_string).collect());
            Ok(())
        }
        "@ptm" => {
            let idx: u32 = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| ParseError {
                    line: lineno,
                    col: head.len() + 2,
                    expected: "layer index after @ptm".into(),
                })?;
            let role = words.next().unwrap_or("");
            let names: Vec<String> = words.map(str::to_string).collect();
            let layer = doc.layers.entry(idx).or_default();
            match role {
                "enz" => layer.enz.extend(names),
                "sub" => layer.sub.extend(names),
                "int" => layer.int.extend(names),
                other => {
                    return Err(ParseError {
                        line: lineno,
                        col: line.find(other).unwrap_or(0) + 1,
                        expected: "'enz', 'sub' or 'int'".into(),
                    }
                    .into())
                }
            }
            Ok(())
        }
        "@rate" => {
            let idx: usize =
                words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| ParseError {
                        line: lineno,
                        col: head.len() + 2,
                        expected: "reaction index after @rate".into(),
                    })?;
            let value = words.next().unwrap_or("");
            let rate = parse_rational(value)
                .filter(|r| r.is_positive())
                .ok_or_else(|| DocumentError::NegativeOrZeroCoefficient(value.to_string()))?;
            doc.rates.insert(idx, rate);
            Ok(())
        }
        "@init" => {
            let name = words.next().unwrap_or("").to_string();
            let value = words.next().unwrap_or("");
            let init = parse_rational(value)
                .filter(|r| !r.is_negative())
                .ok_or_else(|| DocumentError::NegativeOrZeroCoefficient(value.to_string()))?;
            doc.inits.insert(name, init);
            Ok(())
        }
        "@assume-dissipative" => {
            doc.assume_dissipative = true;
            Ok(())
        }
        other => Err(ParseError {
            line: lineno,
            col: 1,
            expected: format!("a known annotation, found {other}"),
        }
        .into()),
    }
}

fn parse_reaction_line(
    line: &str,
    lineno: usize,
    doc: &mut NetworkDocument,
) -> Result<(), DocumentError> {
    let (lhs, rhs, reversible, arrow_col) = split_arrow(line, lineno)?;
    let reactant = parse_complex(lhs, lineno, 1)?;
    let product = parse_complex(rhs, lineno, arrow_col)?;
    if reactant == product {
        return Err(DocumentError::Network(CoreError::SelfLoop(format!(
            "line {lineno}"
        ))));
    }
    doc.reactions.push(RawReaction {
        reactant: reactant.clone(),
        product: product.clone(),
    });
    if reversible {
        doc.reactions.push(RawReaction {
            reactant: product,
            product: reactant,
        });
    }
    Ok(())
}

fn split_arrow(line: &str, lineno: usize) -> Result<(&str, &str, bool, usize), ParseError> {
    if let Some(k) = line.find("<->") {
        Ok((&line[..k], &line[k + 3..], true, k + 4))
    } else if let Some(k) = line.find("->") {
        Ok((&line[..k], &line[k + 2..], false, k + 3))
    } else {
        Err(ParseError {
            line: lineno,
            col: line.len() + 1,
            expected: "'->' or '<->'".into(),
        })
    }
}

fn parse_complex(
    side: &str,
    lineno: usize,
    base_col: usize,
) -> Result<Vec<(String, Rational)>, DocumentError> {
    let trimmed = side.trim();
    if trimmed.is_empty() {
        return Err(ParseError {
            line: lineno,
            col: base_col,
            expected: "a complex ('0' or species terms)".into(),
        }
        .into());
    }
    if trimmed == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    for piece in trimmed.split('+') {
        let term = piece.trim();
        let col = base_col + side.find(term).unwrap_or(0);
        if term.is_empty() {
            return Err(ParseError {
                line: lineno,
                col,
                expected: "a species term".into(),
            }
            .into());
        }
        if term.starts_with('-') {
            return Err(DocumentError::NegativeOrZeroCoefficient(term.to_string()));
        }
        let name_start = term
            .find(|c: char| c.is_alphabetic() || c == '_')
            .ok_or_else(|| ParseError {
                line: lineno,
                col,
                expected: "a species name".into(),
            })?;
        let (coeff_str, name) = term.split_at(name_start);
        let name = name.trim();
        if !is_valid_species_name(name) {
            return Err(ParseError {
                line: lineno,
                col,
                expected: format!("a species identifier, found '{name}'"),
            }
            .into());
        }
        let coeff_str = coeff_str.trim();
        let coeff = if coeff_str.is_empty() {
            rat(1)
        } else {
            match parse_rational(coeff_str) {
                Some(c) if c.is_positive() => c,
                _ => return Err(DocumentError::NegativeOrZeroCoefficient(term.to_string())),
            }
        };
        terms.push((name.to_string(), coeff));
    }
    Ok(terms)
}

fn is_valid_species_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '^' || c == '\'')
}

impl NetworkDocument {
    pub fn network(&self) -> Result<ReactionNetwork, DocumentError> {
        let net = build_network(&self.reactions)?;
        for name in self
            .intermediates
            .iter()
            .flatten()
            .chain(self.catalysts.iter().flatten())
            .chain(self.inits.keys())
            .chain(
                self.layers
                    .values()
                    .flat_map(|l| l.enz.iter().chain(&l.sub).chain(&l.int)),
            )
        {
            if net.species_index(name).is_none() {
                return Err(DocumentError::UnknownSpeciesInAnnotation(name.clone()));
            }
        }
        for &idx in self.rates.keys() {
            if idx == 0 || idx > net.n_reactions() {
                return Err(DocumentError::UnknownSpeciesInAnnotation(format!(
                    "reaction #{idx}"
                )));
            }
        }
        Ok(net)
    }

    pub fn cascade_spec(&self, net: &ReactionNetwork) -> Option<CascadeSpec> {
        if self.layers.is_empty() {
            return None;
        }
        let resolve =
            |names: &[String]| names.iter().filter_map(|n| net.species_index(n)).collect();
        Some(CascadeSpec {
            layers: self
                .layers
                .values()
                .map(|l| PTMPartition {
                    enz: resolve(&l.enz),
                    sub: resolve(&l.sub),
                    int: resolve(&l.int),
                })
                .collect(),
        })
    }

    /// Rate constants in expanded-reaction order, defaulting to one.
    pub fn rate_constants(&self, net: &ReactionNetwork) -> Vec<Rational> {
        (0..net.n_reactions())
            .map(|j| self.rates.get(&(j + 1)).cloned().unwrap_or_else(|| rat(1)))
            .collect()
    }

    /// Initial concentrations per species, defaulting to one.
    pub fn initial_state(&self, net: &ReactionNetwork) -> Vec<f64> {
        net.species_names()
            .iter()
            .map(|n| {
                self.inits
                    .get(n)
                    .map(crn_core::rational::to_f64)
                    .unwrap_or(1.0)
            })
            .collect()
    }
}

/// Prints a document's reactions in the same grammar `parse` accepts.
pub fn print_network(net: &ReactionNetwork) -> String {
    let mut out = String::new();
    for j in 0..net.n_reactions() {
        out.push_str(&format!(
            "{} -> {}\n",
            net.reactant(j).display(net.species_names()),
            net.product(j).display(net.species_names())
        ));
    }
    out
}
