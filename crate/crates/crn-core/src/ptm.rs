//! Enzyme/substrate/intermediate-partitioned networks and their cascades:
//! shape validation, the underlying substrate network, and the specialized
//! strong-connectivity persistence test.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result, Violations};
use crate::feasibility::positive_kernel;
use crate::network::{Complex, ReactionNetwork};
use crate::rational::{is_zero_vec, rat, Rational};
use crate::reduction::{
    remove_catalysts, remove_intermediates, validate_catalysts, validate_intermediates,
    ReductionStep, Validation,
};
use crate::siphon::{
    has_drainable_siphon, siphon_psemiflow_property_with_budget, DEFAULT_NODE_BUDGET,
};

/// Disjoint enzyme/substrate/intermediate split covering the species set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTMPartition {
    pub enz: BTreeSet<usize>,
    pub sub: BTreeSet<usize>,
    pub int: BTreeSet<usize>,
}

impl PTMPartition {
    fn by_names(&self, from: &ReactionNetwork, to: &ReactionNetwork) -> PTMPartition {
        let remap = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            set.iter()
                .filter_map(|&s| to.species_index(from.species_name(s)))
                .collect()
        };
        PTMPartition {
            enz: remap(&self.enz),
            sub: remap(&self.sub),
            int: remap(&self.int),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    SubToSub,
    SubWithEnz,
    ToInt,
    FromInt,
    IntToInt,
}

fn solo_in(c: &Complex, set: &BTreeSet<usize>) -> Option<usize> {
    c.solo_species().filter(|s| set.contains(s))
}

/// `S + E` with unit coefficients, one substrate and one enzyme.
fn sub_enz_pair(c: &Complex, p: &PTMPartition) -> Option<(usize, usize)> {
    let terms: Vec<(usize, &Rational)> = c.terms().collect();
    if terms.len() != 2 {
        return None;
    }
    let one = rat(1);
    if *terms[0].1 != one || *terms[1].1 != one {
        return None;
    }
    let (a, b) = (terms[0].0, terms[1].0);
    if p.sub.contains(&a) && p.enz.contains(&b) {
        Some((a, b))
    } else if p.sub.contains(&b) && p.enz.contains(&a) {
        Some((b, a))
    } else {
        None
    }
}

fn reaction_shape(net: &ReactionNetwork, p: &PTMPartition, j: usize) -> Option<Shape> {
    let r = net.reactant(j);
    let q = net.product(j);
    if solo_in(r, &p.sub).is_some() && solo_in(q, &p.sub).is_some() {
        return Some(Shape::SubToSub);
    }
    if let (Some((_, e)), Some((_, e2))) = (sub_enz_pair(r, p), sub_enz_pair(q, p)) {
        if e == e2 {
            return Some(Shape::SubWithEnz);
        }
    }
    if sub_enz_pair(r, p).is_some() && solo_in(q, &p.int).is_some() {
        return Some(Shape::ToInt);
    }
    if solo_in(r, &p.int).is_some() && sub_enz_pair(q, p).is_some() {
        return Some(Shape::FromInt);
    }
    if solo_in(r, &p.int).is_some() && solo_in(q, &p.int).is_some() {
        return Some(Shape::IntToInt);
    }
    None
}

/// Checks the partition itself, the five reaction shapes, intermediate
/// validity of the `int` block, and enzyme identity preservation along every
/// intermediate path.
pub fn validate_ptm(net: &ReactionNetwork, p: &PTMPartition) -> Result<Validation> {
    let n = net.n_species();
    for &s in p.enz.iter().chain(&p.sub).chain(&p.int) {
        if s >= n {
            return Err(Error::UnknownSpecies(format!("#{s}")));
        }
    }
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    let total = p.enz.len() + p.sub.len() + p.int.len();
    covered.extend(&p.enz);
    covered.extend(&p.sub);
    covered.extend(&p.int);
    if covered.len() != total || covered.len() != n {
        return Err(Error::NotAPartition(
            "enzyme, substrate and intermediate sets must disjointly cover the species".into(),
        ));
    }

    let mut violations = Vec::new();
    let mut shapes = vec![None; net.n_reactions()];
    for j in 0..net.n_reactions() {
        shapes[j] = reaction_shape(net, p, j);
        if shapes[j].is_none() {
            violations.push(format!(
                "reaction {} -> {} fits none of the five shapes",
                net.reactant(j).display(net.species_names()),
                net.product(j).display(net.species_names())
            ));
        }
    }
    if violations.is_empty() && !p.int.is_empty() {
        if let Validation::Invalid(v) = validate_intermediates(net, &p.int)? {
            violations.push(format!("intermediate block invalid: {v}"));
        }
    }
    if violations.is_empty() {
        violations.extend(enzyme_preservation_violations(net, p, &shapes));
    }
    Ok(if violations.is_empty() {
        Validation::Ok
    } else {
        Validation::Invalid(Violations(violations))
    })
}

/// Walks every intermediate path entered by `S + E -> Y` and demands the
/// releasing reactions return the same enzyme.
fn enzyme_preservation_violations(
    net: &ReactionNetwork,
    p: &PTMPartition,
    shapes: &[Option<Shape>],
) -> Vec<String> {
    let mut violations = Vec::new();
    for j in 0..net.n_reactions() {
        if shapes[j] != Some(Shape::ToInt) {
            continue;
        }
        let (_, e_in) = sub_enz_pair(net.reactant(j), p).unwrap();
        let start = net.product(j).solo_species().unwrap();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(y) = queue.pop_front() {
            if !seen.insert(y) {
                continue;
            }
            for k in 0..net.n_reactions() {
                if net.reactant(k).solo_species() != Some(y) {
                    continue;
                }
                match shapes[k] {
                    Some(Shape::IntToInt) => {
                        queue.push_back(net.product(k).solo_species().unwrap());
                    }
                    Some(Shape::FromInt) => {
                        let (_, e_out) = sub_enz_pair(net.product(k), p).unwrap();
                        if e_out != e_in {
                            violations.push(format!(
                                "path from {} through {} releases {} instead of {}",
                                net.reactant(j).display(net.species_names()),
                                net.species_name(y),
                                net.species_name(e_out),
                                net.species_name(e_in)
                            ));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    violations
}

/// Removes the intermediates, then the surviving enzymes as catalysts. The
/// result is the monomolecular substrate skeleton; degenerate blocks pass
/// through unchanged.
pub fn underlying_substrate_network(
    net: &ReactionNetwork,
    p: &PTMPartition,
) -> Result<(ReactionNetwork, Vec<ReductionStep>)> {
    match validate_ptm(net, p)? {
        Validation::Ok => {}
        Validation::Invalid(v) => return Err(Error::NotAPartition(v.to_string())),
    }
    let mut steps = Vec::new();
    let mut current = net.clone();
    if !p.int.is_empty() {
        let (next, step) = remove_intermediates(net, &p.int)?;
        steps.push(step);
        current = next;
    }
    let enz_star: BTreeSet<usize> = current
        .species_names()
        .iter()
        .enumerate()
        .filter(|(_, name)| {
            net.species_index(name)
                .is_some_and(|orig| p.enz.contains(&orig))
        })
        .map(|(k, _)| k)
        .collect();
    if !enz_star.is_empty() {
        debug_assert!(validate_catalysts(&current, &enz_star)
            .map(|v| v.is_ok())
            .unwrap_or(false));
        let (next, step) = remove_catalysts(&current, &enz_star)?;
        steps.push(step);
        current = next;
    }
    Ok((current, steps))
}

#[derive(Clone, Debug)]
pub struct EquivalenceTable {
    pub consistent: bool,
    pub substrate_strongly_connected: bool,
    pub siphon_psemiflow: bool,
    pub drainable_free: bool,
}

#[derive(Clone, Debug)]
pub struct PtmVerdict {
    pub persistent: bool,
    pub substrate_network: ReactionNetwork,
    pub table: EquivalenceTable,
}

/// Persistence of a validated partitioned network: decided by strong
/// connectivity of the substrate skeleton's components. The table carries the
/// three equivalent certificates computed independently.
pub fn ptm_persistence(net: &ReactionNetwork, p: &PTMPartition) -> Result<PtmVerdict> {
    let (substrate, _) = underlying_substrate_network(net, p)?;
    let scc = substrate.components_strongly_connected();
    let n = net.stoichiometric_matrix();
    let table = EquivalenceTable {
        consistent: positive_kernel(&n).is_some(),
        substrate_strongly_connected: scc,
        siphon_psemiflow: siphon_psemiflow_property_with_budget(net, DEFAULT_NODE_BUDGET)?.holds,
        drainable_free: !has_drainable_siphon(net, DEFAULT_NODE_BUDGET)?,
    };
    Ok(PtmVerdict {
        persistent: scc,
        substrate_network: substrate,
        table,
    })
}

/// Layered decomposition: each layer is a partitioned subnetwork; substrates
/// of later layers may act as enzymes of earlier ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeSpec {
    pub layers: Vec<PTMPartition>,
}

/// Reactions assigned to a layer: supported inside the layer's species and
/// matching one of its shapes.
fn layer_network(net: &ReactionNetwork, p: &PTMPartition) -> Result<(ReactionNetwork, Vec<usize>)> {
    let species: BTreeSet<usize> = p.enz.iter().chain(&p.sub).chain(&p.int).copied().collect();
    let mut assigned = Vec::new();
    let mut pairs = Vec::new();
    for j in 0..net.n_reactions() {
        let inside = net
            .reactant(j)
            .support()
            .chain(net.product(j).support())
            .all(|s| species.contains(&s));
        if inside && reaction_shape(net, p, j).is_some() {
            assigned.push(j);
            pairs.push((net.reactant(j).clone(), net.product(j).clone()));
        }
    }
    let g = ReactionNetwork::from_complex_pairs(net.species_names().to_vec(), pairs)?;
    Ok((g, assigned))
}

pub fn validate_cascade(net: &ReactionNetwork, spec: &CascadeSpec) -> Result<Validation> {
    if spec.layers.is_empty() {
        return Err(Error::NotAPartition(
            "a cascade needs at least one layer".into(),
        ));
    }
    let mut violations = Vec::new();
    let mut covered_reactions: BTreeSet<usize> = BTreeSet::new();
    let mut covered_species: BTreeSet<usize> = BTreeSet::new();
    for (idx, layer) in spec.layers.iter().enumerate() {
        for &s in layer.enz.iter().chain(&layer.sub).chain(&layer.int) {
            if s >= net.n_species() {
                return Err(Error::UnknownSpecies(format!("#{s}")));
            }
            covered_species.insert(s);
        }
        let (g, assigned) = layer_network(net, layer)?;
        covered_reactions.extend(&assigned);
        let declared: BTreeSet<&str> = layer
            .enz
            .iter()
            .chain(&layer.sub)
            .chain(&layer.int)
            .map(|&s| net.species_name(s))
            .collect();
        let derived: BTreeSet<&str> = g.species_names().iter().map(|s| s.as_str()).collect();
        if declared != derived {
            violations.push(format!(
                "layer {} declares species taking part in none of its reactions: {}",
                idx + 1,
                declared
                    .difference(&derived)
                    .copied()
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
            continue;
        }
        let local = layer.by_names(net, &g);
        match validate_ptm(&g, &local) {
            Ok(Validation::Ok) => {}
            Ok(Validation::Invalid(v)) => violations.push(format!(
                "layer {} is not a valid partitioned system: {v}",
                idx + 1
            )),
            Err(e) => violations.push(format!("layer {}: {e}", idx + 1)),
        }
    }
    // illegal sharing between layers is a hard error, not a violation:
    // later substrates never reuse earlier ones, enzymes may not be
    // substrates at their own or earlier layers, and intermediates stay
    // disjoint from enzymes and substrates everywhere
    let mut earlier_subs: BTreeSet<usize> = BTreeSet::new();
    for (idx, layer) in spec.layers.iter().enumerate() {
        if layer.sub.intersection(&earlier_subs).next().is_some() {
            return Err(Error::LayerOverlap(format!(
                "layer {} reuses a substrate of an earlier layer",
                idx + 1
            )));
        }
        earlier_subs.extend(&layer.sub);
        if layer.enz.intersection(&earlier_subs).next().is_some() {
            return Err(Error::LayerOverlap(format!(
                "layer {} uses a substrate of this or an earlier layer as an enzyme",
                idx + 1
            )));
        }
    }
    let all_int: BTreeSet<usize> = spec
        .layers
        .iter()
        .flat_map(|l| l.int.iter().copied())
        .collect();
    let all_enz_sub: BTreeSet<usize> = spec
        .layers
        .iter()
        .flat_map(|l| l.enz.iter().chain(&l.sub).copied())
        .collect();
    if all_int.intersection(&all_enz_sub).next().is_some() {
        return Err(Error::LayerOverlap(
            "intermediates overlap enzymes or substrates across layers".into(),
        ));
    }
    if covered_species.len() != net.n_species() {
        violations.push("layers do not cover the species set".into());
    }
    if covered_reactions.len() != net.n_reactions() {
        violations.push("layers do not cover the reaction set".into());
    }
    Ok(if violations.is_empty() {
        Validation::Ok
    } else {
        Validation::Invalid(Violations(violations))
    })
}

#[derive(Clone, Debug)]
pub struct LayerReport {
    pub substrate_network: ReactionNetwork,
    pub strongly_connected: bool,
}

#[derive(Clone, Debug)]
pub struct CascadeVerdict {
    pub persistent: bool,
    pub layers: Vec<LayerReport>,
    pub table: EquivalenceTable,
}

/// Persistence of a validated cascade: every layer's substrate skeleton must
/// have strongly connected components.
pub fn cascade_persistence(net: &ReactionNetwork, spec: &CascadeSpec) -> Result<CascadeVerdict> {
    match validate_cascade(net, spec)? {
        Validation::Ok => {}
        Validation::Invalid(v) => return Err(Error::NotAPartition(v.to_string())),
    }
    let mut layers = Vec::new();
    for layer in &spec.layers {
        let (g, _) = layer_network(net, layer)?;
        let local = layer.by_names(net, &g);
        let (substrate, _) = underlying_substrate_network(&g, &local)?;
        layers.push(LayerReport {
            strongly_connected: substrate.components_strongly_connected(),
            substrate_network: substrate,
        });
    }
    let persistent = layers.iter().all(|l| l.strongly_connected);
    let n = net.stoichiometric_matrix();
    let table = EquivalenceTable {
        consistent: positive_kernel(&n).is_some(),
        substrate_strongly_connected: persistent,
        siphon_psemiflow: siphon_psemiflow_property_with_budget(net, DEFAULT_NODE_BUDGET)?.holds,
        drainable_free: !has_drainable_siphon(net, DEFAULT_NODE_BUDGET)?,
    };
    Ok(CascadeVerdict {
        persistent,
        layers,
        table,
    })
}

/// The canonical cascade conservation law: weight one on enzymes and
/// substrates, two on intermediates. Replayed exactly before returning.
pub fn cascade_conservation_law(
    net: &ReactionNetwork,
    spec: &CascadeSpec,
) -> Result<Vec<Rational>> {
    match validate_cascade(net, spec)? {
        Validation::Ok => {}
        Validation::Invalid(v) => return Err(Error::NotAPartition(v.to_string())),
    }
    let all_int: BTreeSet<usize> = spec
        .layers
        .iter()
        .flat_map(|l| l.int.iter().copied())
        .collect();
    let omega: Vec<Rational> = (0..net.n_species())
        .map(|s| if all_int.contains(&s) { rat(2) } else { rat(1) })
        .collect();
    let residual = net.stoichiometric_matrix().left_mul(&omega);
    if !is_zero_vec(&residual) {
        return Err(Error::NotAConservationLaw);
    }
    Ok(omega)
}

/// Drops the last layer: keeps the reactions of the earlier layers and
/// removes the last layer's enzymes that also act in them, as catalysts.
/// The per-layer substrate networks are preserved by this operation.
pub fn peel_top_layer(
    net: &ReactionNetwork,
    spec: &CascadeSpec,
) -> Result<(ReactionNetwork, CascadeSpec)> {
    if spec.layers.len() < 2 {
        return Err(Error::NotAPartition(
            "peeling needs at least two layers".into(),
        ));
    }
    if spec.layers.iter().any(|l| !l.int.is_empty()) {
        return Err(Error::NotAPartition(
            "peeling requires an intermediate-free cascade; remove intermediates first".into(),
        ));
    }
    let lower = &spec.layers[..spec.layers.len() - 1];
    let top = spec.layers.last().unwrap();
    let mut pairs = Vec::new();
    let mut kept: BTreeSet<usize> = BTreeSet::new();
    for layer in lower {
        let (_, assigned) = layer_network(net, layer)?;
        kept.extend(assigned);
    }
    for &j in &kept {
        pairs.push((net.reactant(j).clone(), net.product(j).clone()));
    }
    let lower_net = ReactionNetwork::from_complex_pairs(net.species_names().to_vec(), pairs)?;

    let lower_enz: BTreeSet<usize> = lower.iter().flat_map(|l| l.enz.iter().copied()).collect();
    let shared: BTreeSet<usize> = top
        .enz
        .intersection(&lower_enz)
        .filter_map(|&s| lower_net.species_index(net.species_name(s)))
        .collect();
    let peeled = if shared.is_empty() {
        lower_net
    } else {
        remove_catalysts(&lower_net, &shared)?.0
    };
    let layers = lower
        .iter()
        .map(|l| {
            let reduced = PTMPartition {
                enz: l.enz.difference(&top.enz).copied().collect(),
                sub: l.sub.clone(),
                int: l.int.clone(),
            };
            reduced.by_names(net, &peeled)
        })
        .collect();
    Ok((peeled, CascadeSpec { layers }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(src: &str) -> ReactionNetwork {
        src.parse().unwrap()
    }

    fn ids(net: &ReactionNetwork, names: &[&str]) -> BTreeSet<usize> {
        names
            .iter()
            .map(|n| net.species_index(n).unwrap())
            .collect()
    }

    fn phos_partition(g: &ReactionNetwork) -> PTMPartition {
        PTMPartition {
            enz: ids(g, &["E", "F"]),
            sub: ids(g, &["S0", "S1"]),
            int: ids(g, &["ES0", "FS1"]),
        }
    }

    #[test]
    fn phosphorylation_is_a_valid_ptm() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        assert!(validate_ptm(&g, &phos_partition(&g)).unwrap().is_ok());
    }

    #[test]
    fn misfiled_enzyme_breaks_shape() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        let bad = PTMPartition {
            enz: ids(&g, &["F"]),
            sub: ids(&g, &["S0", "S1", "E"]),
            int: ids(&g, &["ES0", "FS1"]),
        };
        assert!(!validate_ptm(&g, &bad).unwrap().is_ok());
    }

    #[test]
    fn substrate_network_of_phosphorylation() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        let (sub, steps) = underlying_substrate_network(&g, &phos_partition(&g)).unwrap();
        assert!(sub.eq_up_to_ordering(&net("S0 <-> S1")));
        assert_eq!(steps.len(), 2);
    }

    #[test]
    fn irreversible_core_substrate_chain() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1");
        let p = PTMPartition {
            enz: ids(&g, &["E"]),
            sub: ids(&g, &["S0", "S1"]),
            int: ids(&g, &["ES0"]),
        };
        let (sub, _) = underlying_substrate_network(&g, &p).unwrap();
        assert!(sub.eq_up_to_ordering(&net("S0 -> S1")));
        let verdict = ptm_persistence(&g, &p).unwrap();
        assert!(!verdict.persistent);
        assert!(!verdict.table.consistent);
    }

    #[test]
    fn nsite_mechanism_persistent() {
        for n in 1..=4 {
            let g = nsite(n);
            let p = nsite_partition(&g, n);
            let verdict = ptm_persistence(&g, &p).unwrap();
            assert!(verdict.persistent, "n = {n}");
            assert!(verdict.table.consistent);
            assert!(verdict.table.siphon_psemiflow);
            assert!(verdict.table.drainable_free);
        }
    }

    fn nsite(n: usize) -> ReactionNetwork {
        let mut lines = Vec::new();
        for i in 0..n {
            lines.push(format!("E + S{i} <-> ES{i}; ES{i} -> E + S{}", i + 1));
            lines.push(format!(
                "F + S{} <-> FS{}; FS{} -> F + S{i}",
                i + 1,
                i + 1,
                i + 1
            ));
        }
        lines.join("; ").parse().unwrap()
    }

    fn nsite_partition(g: &ReactionNetwork, n: usize) -> PTMPartition {
        let mut int = Vec::new();
        let mut sub = Vec::new();
        for i in 0..n {
            int.push(format!("ES{i}"));
            int.push(format!("FS{}", i + 1));
        }
        for i in 0..=n {
            sub.push(format!("S{i}"));
        }
        PTMPartition {
            enz: ids(g, &["E", "F"]),
            sub: sub.iter().map(|s| g.species_index(s).unwrap()).collect(),
            int: int.iter().map(|s| g.species_index(s).unwrap()).collect(),
        }
    }

    fn double_cascade() -> ReactionNetwork {
        "E + S_0 <-> ES_0; ES_0 -> E + S_1; E + S_1 <-> ES_1; ES_1 -> E + S_2; \
         F_1 + S_2 <-> F_1S_2; F_1S_2 -> F_1 + S_1; F_1 + S_1 <-> F_1S_1; F_1S_1 -> F_1 + S_0; \
         S_2 + P_0 <-> S_2P_0; S_2P_0 -> S_2 + P_1; S_2 + P_1 <-> S_2P_1; S_2P_1 -> S_2 + P_2; \
         F_2 + P_2 <-> F_2P_2; F_2P_2 -> F_2 + P_1; F_2 + P_1 <-> F_2P_1; F_2P_1 -> F_2 + P_0"
            .parse()
            .unwrap()
    }

    fn double_cascade_spec(g: &ReactionNetwork) -> CascadeSpec {
        CascadeSpec {
            layers: vec![
                PTMPartition {
                    enz: ids(g, &["S_2", "F_2"]),
                    sub: ids(g, &["P_0", "P_1", "P_2"]),
                    int: ids(g, &["S_2P_0", "S_2P_1", "F_2P_2", "F_2P_1"]),
                },
                PTMPartition {
                    enz: ids(g, &["E", "F_1"]),
                    sub: ids(g, &["S_0", "S_1", "S_2"]),
                    int: ids(g, &["ES_0", "ES_1", "F_1S_2", "F_1S_1"]),
                },
            ],
        }
    }

    #[test]
    fn double_cascade_validates_and_persists() {
        let g = double_cascade();
        let spec = double_cascade_spec(&g);
        assert!(validate_cascade(&g, &spec).unwrap().is_ok());
        let verdict = cascade_persistence(&g, &spec).unwrap();
        assert!(verdict.persistent);
        for layer in &verdict.layers {
            assert!(layer.strongly_connected);
        }
        assert!(verdict.table.consistent);
    }

    #[test]
    fn broken_layer_fails_persistence() {
        // drop the reverse phosphatase direction in the lower layer
        let g: ReactionNetwork =
            "E + S_0 <-> ES_0; ES_0 -> E + S_1; S_1 + P_0 <-> S_1P_0; S_1P_0 -> S_1 + P_1"
                .parse()
                .unwrap();
        let spec = CascadeSpec {
            layers: vec![
                PTMPartition {
                    enz: ids(&g, &["S_1"]),
                    sub: ids(&g, &["P_0", "P_1"]),
                    int: ids(&g, &["S_1P_0"]),
                },
                PTMPartition {
                    enz: ids(&g, &["E"]),
                    sub: ids(&g, &["S_0", "S_1"]),
                    int: ids(&g, &["ES_0"]),
                },
            ],
        };
        assert!(validate_cascade(&g, &spec).unwrap().is_ok());
        let verdict = cascade_persistence(&g, &spec).unwrap();
        assert!(!verdict.persistent);
    }

    #[test]
    fn substrate_of_an_earlier_layer_cannot_enzyme_a_later_one() {
        let g: ReactionNetwork =
            "E + P_0 -> E + P_1; P_1 -> P_0; P_1 + S_0 -> P_1 + S_1; S_1 -> S_0"
                .parse()
                .unwrap();
        let spec = CascadeSpec {
            layers: vec![
                PTMPartition {
                    enz: ids(&g, &["E"]),
                    sub: ids(&g, &["P_0", "P_1"]),
                    int: BTreeSet::new(),
                },
                PTMPartition {
                    enz: ids(&g, &["P_1"]),
                    sub: ids(&g, &["S_0", "S_1"]),
                    int: BTreeSet::new(),
                },
            ],
        };
        assert!(matches!(
            validate_cascade(&g, &spec),
            Err(Error::LayerOverlap(_))
        ));
    }

    #[test]
    fn cascade_conservation_law_replay() {
        let g = double_cascade();
        let spec = double_cascade_spec(&g);
        let omega = cascade_conservation_law(&g, &spec).unwrap();
        for (s, w) in omega.iter().enumerate() {
            let name = g.species_name(s);
            let expected = if name.contains("S_2P")
                || name.contains("F_2P")
                || name.starts_with("ES")
                || name.starts_with("F_1S")
            {
                rat(2)
            } else {
                rat(1)
            };
            assert_eq!(*w, expected, "{name}");
        }
    }

    #[test]
    fn single_layer_conservation_weights() {
        let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
        let spec = CascadeSpec {
            layers: vec![phos_partition(&g)],
        };
        let omega = cascade_conservation_law(&g, &spec).unwrap();
        let expect = |name: &str| omega[g.species_index(name).unwrap()].clone();
        assert_eq!(expect("E"), rat(1));
        assert_eq!(expect("F"), rat(1));
        assert_eq!(expect("S0"), rat(1));
        assert_eq!(expect("S1"), rat(1));
        assert_eq!(expect("ES0"), rat(2));
        assert_eq!(expect("FS1"), rat(2));
    }

    #[test]
    fn peeling_preserves_lower_substrate_networks() {
        // intermediate-free cascade with the phosphatase F shared by both layers
        let g: ReactionNetwork =
            "E + S_0 -> E + S_1; F + S_1 -> F + S_0; S_1 + P_0 -> S_1 + P_1; F + P_1 -> F + P_0"
                .parse()
                .unwrap();
        let spec = CascadeSpec {
            layers: vec![
                PTMPartition {
                    enz: ids(&g, &["S_1", "F"]),
                    sub: ids(&g, &["P_0", "P_1"]),
                    int: BTreeSet::new(),
                },
                PTMPartition {
                    enz: ids(&g, &["E", "F"]),
                    sub: ids(&g, &["S_0", "S_1"]),
                    int: BTreeSet::new(),
                },
            ],
        };
        assert!(validate_cascade(&g, &spec).unwrap().is_ok());

        let original_layer1 = {
            let (layer, _) = layer_network(&g, &spec.layers[0]).unwrap();
            let local = spec.layers[0].by_names(&g, &layer);
            underlying_substrate_network(&layer, &local).unwrap().0
        };
        let (peeled, lower_spec) = peel_top_layer(&g, &spec).unwrap();
        let (layer, _) = layer_network(&peeled, &lower_spec.layers[0]).unwrap();
        let local = lower_spec.layers[0].by_names(&peeled, &layer);
        let peeled_layer1 = underlying_substrate_network(&layer, &local).unwrap().0;
        assert!(original_layer1.eq_up_to_ordering(&peeled_layer1));
    }
}
