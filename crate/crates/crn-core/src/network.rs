//! Reaction-network data model: species, complexes, the reaction digraph,
//! stoichiometric and incidence matrices, and the graph algorithms the rest
//! of the crate builds on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, Rational, RationalMatrix};

/// Ordinal of a species inside one network. Ordinals are assigned by first
/// appearance in the reaction list and never change afterwards; the name
/// lives in the owning network's species table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeciesId(pub usize);

impl SpeciesId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A complex: a formal nonnegative rational combination of species.
/// Zero coefficients are never stored; the empty map is the zero complex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Complex(BTreeMap<usize, Rational>);

impl Complex {
    pub fn zero() -> Self {
        Complex(BTreeMap::new())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, c) in terms {
            if c.is_negative() {
                return Err(Error::NegativeCoefficient(format!("species #{s}")));
            }
            if c.is_zero() {
                continue;
            }
            *map.entry(s).or_insert_with(Rational::zero) += c;
        }
        Ok(Complex(map))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, species: usize) -> Rational {
        self.0.get(&species).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, species: usize) -> bool {
        self.0.contains_key(&species)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(s, c)| (*s, c))
    }

    /// `Some(s)` when the complex is exactly one species with coefficient 1.
    pub fn solo_species(&self) -> Option<usize> {
        if self.0.len() != 1 {
            return None;
        }
        let (&s, c) = self.0.iter().next().unwrap();
        (*c == rat(1)).then_some(s)
    }

    /// Keeps only the given species, preserving coefficients.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Complex {
        Complex(
            self.0
                .iter()
                .filter(|(s, _)| keep.contains(s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        )
    }

    /// Rewrites species ordinals through `map`; entries absent from `map` are dropped.
    pub fn remap(&self, map: &HashMap<usize, usize>) -> Complex {
        Complex(
            self.0
                .iter()
                .filter_map(|(s, c)| map.get(s).map(|&t| (t, c.clone())))
                .collect(),
        )
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ComplexDisplay<'a> {
        ComplexDisplay {
            complex: self,
            names,
        }
    }

    fn named(&self, names: &[String]) -> BTreeMap<String, Rational> {
        self.0
            .iter()
            .map(|(s, c)| (names[*s].clone(), c.clone()))
            .collect()
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a Complex,
    names: &'a [String],
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complex.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in self.complex.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != rat(1) {
                write!(f, "{}", c)?;
            }
            write!(f, "{}", self.names[s])?;
        }
        Ok(())
    }
}

/// A reaction, as a view into the network's interned complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub reactant: usize,
    pub product: usize,
}

/// An immutable reaction network: ordered species, interned complexes, and a
/// self-loop-free digraph on the complexes. All analysis operations are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

/// Name-based reaction used when assembling a network from parsed input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawReaction {
    pub reactant: Vec<(String, Rational)>,
    pub product: Vec<(String, Rational)>,
}

/// Builds a validated network from name-based reactions. Species receive
/// ordinals by first appearance; complexes are interned structurally.
pub fn build_network(reactions: &[RawReaction]) -> Result<ReactionNetwork> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |side: &[(String, Rational)]| -> Result<Complex> {
        let mut terms = Vec::new();
        for (name, coeff) in side {
            if name.is_empty() {
                return Err(Error::UnknownSpecies("<empty name>".into()));
            }
            if coeff.is_negative() || coeff.is_zero() {
                return Err(Error::NegativeCoefficient(name.clone()));
            }
            let id = *index.entry(name.clone()).or_insert_with(|| {
                names.push(name.clone());
                names.len() - 1
            });
            terms.push((id, coeff.clone()));
        }
        Complex::from_terms(terms)
    };
    let mut pairs = Vec::new();
    for r in reactions {
        let reactant = intern(&r.reactant)?;
        let product = intern(&r.product)?;
        pairs.push((reactant, product));
    }
    ReactionNetwork::from_complex_pairs(names, pairs)
}

impl ReactionNetwork {
    pub fn empty() -> Self {
        ReactionNetwork {
            species: Vec::new(),
            complexes: Vec::new(),
            reactions: Vec::new(),
        }
    }

    /// Assembles a network from complex pairs over a provisional species table.
    /// Species unused by any reaction are dropped and ordinals are reassigned
    /// by first appearance, so equal reaction lists yield equal networks.
    pub fn from_complex_pairs(
        provisional_names: Vec<String>,
        pairs: Vec<(Complex, Complex)>,
    ) -> Result<Self> {
        // first-appearance order over the reaction list
        let mut order: Vec<usize> = Vec::new();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (r, p) in &pairs {
            for s in r.support().chain(p.support()) {
                if seen.insert(s) {
                    order.push(s);
                }
            }
        }
        let remap: HashMap<usize, usize> = order.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let species: Vec<String> = order
            .iter()
            .map(|&s| provisional_names[s].clone())
            .collect();

        let mut complexes: Vec<Complex> = Vec::new();
        let mut complex_index: BTreeMap<Complex, usize> = BTreeMap::new();
        let mut reactions: Vec<Reaction> = Vec::new();
        let mut seen_reactions: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (r, p) in &pairs {
            let r = r.remap(&remap);
            let p = p.remap(&remap);
            if r == p {
                return Err(Error::SelfLoop(format!(
                    "{} -> {}",
                    r.display(&species),
                    p.display(&species)
                )));
            }
            let mut intern = |c: Complex| -> usize {
                *complex_index.entry(c.clone()).or_insert_with(|| {
                    complexes.push(c);
                    complexes.len() - 1
                })
            };
            let ri = intern(r);
            let pi = intern(p);
            if !seen_reactions.insert((ri, pi)) {
                return Err(Error::DuplicateReaction(format!(
                    "{} -> {}",
                    complexes[ri].display(&species),
                    complexes[pi].display(&species)
                )));
            }
            reactions.push(Reaction {
                reactant: ri,
                product: pi,
            });
        }
        Ok(ReactionNetwork {
            species,
            complexes,
            reactions,
        })
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_complexes(&self) -> usize {
        self.complexes.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reactions.is_empty()
    }

    pub fn species_names(&self) -> &[String] {
        &self.species
    }

    pub fn species_name(&self, s: usize) -> &str {
        &self.species[s]
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|n| n == name)
    }

    pub fn species_ids(&self) -> impl Iterator<Item = SpeciesId> {
        (0..self.species.len()).map(SpeciesId)
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn complex(&self, c: usize) -> &Complex {
        &self.complexes[c]
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn reactant(&self, j: usize) -> &Complex {
        &self.complexes[self.reactions[j].reactant]
    }

    pub fn product(&self, j: usize) -> &Complex {
        &self.complexes[self.reactions[j].product]
    }

    pub fn zero_complex_index(&self) -> Option<usize> {
        self.complexes.iter().position(|c| c.is_zero())
    }

    /// Species-by-reactions matrix with column j equal to product − reactant.
    pub fn stoichiometric_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.n_species(), self.n_reactions(), |i, j| {
            self.product(j).coeff(i) - self.reactant(j).coeff(i)
        })
    }

    /// Complexes-by-reactions matrix: −1 at the reactant, +1 at the product.
    pub fn incidence_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zero(self.n_complexes(), self.n_reactions());
        for (j, r) in self.reactions.iter().enumerate() {
            m.set(r.reactant, j, rat(-1));
            m.set(r.product, j, rat(1));
        }
        m
    }

    /// Reactions whose species all lie in `subset`, reassembled as a network.
    /// The resulting species set may be strictly smaller than `subset`.
    pub fn implied_subnetwork(&self, subset: &BTreeSet<usize>) -> Result<ReactionNetwork> {
        for &s in subset {
            if s >= self.n_species() {
                return Err(Error::UnknownSpecies(format!("#{s}")));
            }
        }
        let pairs: Vec<(Complex, Complex)> = self
            .reactions
            .iter()
            .filter(|r| {
                self.complexes[r.reactant]
                    .support()
                    .chain(self.complexes[r.product].support())
                    .all(|s| subset.contains(&s))
            })
            .map(|r| {
                (
                    self.complexes[r.reactant].clone(),
                    self.complexes[r.product].clone(),
                )
            })
            .collect();
        ReactionNetwork::from_complex_pairs(self.species.clone(), pairs)
    }

    fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_complexes()];
        for r in &self.reactions {
            adj[r.reactant].push(r.product);
            adj[r.product].push(r.reactant);
        }
        adj
    }

    pub fn directed_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_complexes()];
        for r in &self.reactions {
            adj[r.reactant].push(r.product);
        }
        adj
    }

    /// Partition of the complexes by undirected reachability, each class
    /// sorted, classes ordered by least complex index.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.undirected_adjacency();
        let mut comp = vec![usize::MAX; self.n_complexes()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for start in 0..self.n_complexes() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        classes
    }

    /// Component id per complex, aligned with `connected_components` order.
    pub fn component_ids(&self) -> Vec<usize> {
        let classes = self.connected_components();
        let mut ids = vec![0; self.n_complexes()];
        for (k, class) in classes.iter().enumerate() {
            for &c in class {
                ids[c] = k;
            }
        }
        ids
    }

    /// Tarjan strongly connected components of the reaction digraph,
    /// deterministically ordered by least complex index.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.directed_adjacency();
        let n = self.n_complexes();
        let mut state = TarjanState {
            index: 0,
            stack: Vec::new(),
            on_stack: vec![false; n],
            idx: vec![None; n],
            low: vec![0; n],
            comps: Vec::new(),
        };
        for v in 0..n {
            if state.idx[v].is_none() {
                strongconnect(v, &adj, &mut state);
            }
        }
        let mut comps = state.comps;
        for c in comps.iter_mut() {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// True when every connected component of the reaction graph is strongly
    /// connected (weak reversibility).
    pub fn components_strongly_connected(&self) -> bool {
        let cc = self.connected_components();
        let scc = self.strongly_connected_components();
        cc.len() == scc.len()
    }

    /// True when every complex is the zero complex or a single species with
    /// coefficient one.
    pub fn is_monomolecular(&self) -> bool {
        self.complexes
            .iter()
            .all(|c| c.is_zero() || c.solo_species().is_some())
    }

    /// The reactions as name-based data, suitable for rebuilding the network.
    pub fn raw_reactions(&self) -> Vec<RawReaction> {
        self.reactions
            .iter()
            .map(|r| RawReaction {
                reactant: self.complexes[r.reactant]
                    .terms()
                    .map(|(s, c)| (self.species[s].clone(), c.clone()))
                    .collect(),
                product: self.complexes[r.product]
                    .terms()
                    .map(|(s, c)| (self.species[s].clone(), c.clone()))
                    .collect(),
            })
            .collect()
    }

    /// Order-independent equality: same reaction set over the same species names.
    pub fn eq_up_to_ordering(&self, other: &ReactionNetwork) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    fn canonical_form(&self) -> BTreeSet<(BTreeMap<String, Rational>, BTreeMap<String, Rational>)> {
        self.reactions
            .iter()
            .map(|r| {
                (
                    self.complexes[r.reactant].named(&self.species),
                    self.complexes[r.product].named(&self.species),
                )
            })
            .collect()
    }

    /// Deterministic one-line-per-reaction rendering with sorted lines,
    /// used for network comparison in reports and tests.
    pub fn canonical_string(&self) -> String {
        let mut lines: Vec<String> = self
            .reactions
            .iter()
            .map(|r| {
                format!(
                    "{} -> {}",
                    self.complexes[r.reactant].display(&self.species),
                    self.complexes[r.product].display(&self.species)
                )
            })
            .collect();
        lines.sort();
        lines.join("\n")
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, r) in self.reactions.iter().enumerate() {
            if j > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "{} -> {}",
                self.complexes[r.reactant].display(&self.species),
                self.complexes[r.product].display(&self.species)
            )?;
        }
        Ok(())
    }
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], state: &mut TarjanState) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &adj[v] {
        if state.idx[w].is_none() {
            strongconnect(w, adj, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }

    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("tarjan stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

/// Lenient text constructor for programmatic use and tests. One reaction per
/// line or semicolon-separated; `<->` expands to both directions; `#` starts
/// a comment. The `.crn` file format with annotations lives in the CLI crate.
impl FromStr for ReactionNetwork {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for piece in src.split(['\n', ';']) {
            let line = piece.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs, reversible) = if let Some((l, r)) = line.split_once("<->") {
                (l, r, true)
            } else if let Some((l, r)) = line.split_once("->") {
                (l, r, false)
            } else {
                return Err(Error::UnknownSpecies(format!("unparseable line: {line}")));
            };
            let reactant = parse_side(lhs)?;
            let product = parse_side(rhs)?;
            raw.push(RawReaction {
                reactant: reactant.clone(),
                product: product.clone(),
            });
            if reversible {
                raw.push(RawReaction {
                    reactant: product,
                    product: reactant,
                });
            }
        }
        build_network(&raw)
    }
}

fn parse_side(side: &str) -> Result<Vec<(String, Rational)>> {
    let side = side.trim();
    if side == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    for term in side.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::UnknownSpecies("<empty term>".into()));
        }
        let split = term
            .find(|c: char| c.is_alphabetic() || c == '_')
            .unwrap_or(term.len());
        let (coeff_str, name) = term.split_at(split);
        let coeff_str = coeff_str.trim();
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::UnknownSpecies(format!(
                "missing species in '{term}'"
            )));
        }
        let coeff = if coeff_str.is_empty() {
            rat(1)
        } else {
            parse_rational(coeff_str).ok_or_else(|| Error::NegativeCoefficient(term.into()))?
        };
        terms.push((name.to_string(), coeff));
    }
    Ok(terms)
}
