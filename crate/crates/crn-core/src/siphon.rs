//! Siphons: the predicate, minimal-siphon enumeration, classification with
//! replayable witnesses, and the reaction-pathway construction used as an
//! independent oracle for drainability.

use std::collections::{BTreeSet, HashSet};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::feasibility::{semiflow_supported_in, signed_combination, SignKind, Witness};
use crate::network::ReactionNetwork;
use crate::rational::Rational;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

/// A nonempty species set closed under the siphon rule: every reaction with a
/// product in the set has a reactant in the set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Siphon(pub BTreeSet<usize>);

impl Siphon {
    pub fn members(&self) -> &BTreeSet<usize> {
        &self.0
    }

    pub fn names(&self, net: &ReactionNetwork) -> Vec<String> {
        self.0
            .iter()
            .map(|&s| net.species_name(s).to_string())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SiphonClassification {
    pub siphon: Siphon,
    pub minimal: bool,
    pub critical: bool,
    pub drainable: Option<Witness>,
    pub self_replicable: Option<Witness>,
    pub semiflow: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct PsfVerdict {
    pub holds: bool,
    pub violating_siphon: Option<Siphon>,
    pub witnesses: Vec<(Siphon, Witness)>,
}

pub fn is_siphon(net: &ReactionNetwork, sigma: &BTreeSet<usize>) -> Result<bool> {
    if sigma.is_empty() {
        return Err(Error::EmptySet);
    }
    for &s in sigma {
        if s >= net.n_species() {
            return Err(Error::UnknownSpecies(format!("#{s}")));
        }
    }
    Ok(holds_siphon_rule(net, sigma))
}

fn holds_siphon_rule(net: &ReactionNetwork, sigma: &BTreeSet<usize>) -> bool {
    net.reactions().iter().enumerate().all(|(j, _)| {
        let product_hits = net.product(j).support().any(|s| sigma.contains(&s));
        !product_hits || net.reactant(j).support().any(|s| sigma.contains(&s))
    })
}

/// Largest siphon contained in `within` (possibly empty): repeatedly deletes
/// the products of reactions whose reactants already miss the set.
pub fn max_siphon_within(net: &ReactionNetwork, within: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut u = within.clone();
    loop {
        let mut removed = false;
        for (j, _) in net.reactions().iter().enumerate() {
            if net.reactant(j).support().any(|s| u.contains(&s)) {
                continue;
            }
            let offenders: Vec<usize> =
                net.product(j).support().filter(|s| u.contains(s)).collect();
            if !offenders.is_empty() {
                for s in offenders {
                    u.remove(&s);
                }
                removed = true;
            }
        }
        if !removed {
            return u;
        }
    }
}

pub fn is_minimal_siphon(net: &ReactionNetwork, sigma: &BTreeSet<usize>) -> Result<bool> {
    if !is_siphon(net, sigma)? {
        return Ok(false);
    }
    for &s in sigma {
        let mut smaller = sigma.clone();
        smaller.remove(&s);
        if !max_siphon_within(net, &smaller).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All inclusion-minimal siphons, deterministically sorted. Branch and bound
/// seeded per species: grow a partial set along violated reactions, branching
/// on each reactant, pruning supersets of recorded siphons. Aborts with
/// `ExplosionCap` when the node budget is exhausted.
pub fn minimal_siphons(net: &ReactionNetwork) -> Result<Vec<Siphon>> {
    minimal_siphons_with_budget(net, DEFAULT_NODE_BUDGET)
}

pub fn minimal_siphons_with_budget(net: &ReactionNetwork, budget: u64) -> Result<Vec<Siphon>> {
    let n = net.n_species();
    let mut found: Vec<BTreeSet<usize>> = Vec::new();
    let mut nodes: u64 = 0;
    for seed in 0..n {
        let mut visited: HashSet<Vec<usize>> = HashSet::new();
        let start: BTreeSet<usize> = [seed].into_iter().collect();
        grow(
            net,
            start,
            seed,
            budget,
            &mut nodes,
            &mut visited,
            &mut found,
        )?;
    }
    // cross-seed minimality and deduplication
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    found.dedup();
    let mut minimal: Vec<BTreeSet<usize>> = Vec::new();
    for cand in found {
        if !minimal.iter().any(|m| m.is_subset(&cand)) {
            minimal.push(cand);
        }
    }
    minimal.sort();
    Ok(minimal.into_iter().map(Siphon).collect())
}

fn grow(
    net: &ReactionNetwork,
    current: BTreeSet<usize>,
    seed: usize,
    budget: u64,
    nodes: &mut u64,
    visited: &mut HashSet<Vec<usize>>,
    found: &mut Vec<BTreeSet<usize>>,
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::ExplosionCap(budget));
    }
    let key: Vec<usize> = current.iter().copied().collect();
    if !visited.insert(key) {
        return Ok(());
    }
    if found.iter().any(|f| f.is_subset(&current)) {
        return Ok(());
    }
    let violated = net.reactions().iter().enumerate().find(|(j, _)| {
        net.product(*j).support().any(|s| current.contains(&s))
            && !net.reactant(*j).support().any(|s| current.contains(&s))
    });
    let Some((j, _)) = violated else {
        found.push(current);
        return Ok(());
    };
    for s in net.reactant(j).support() {
        if s < seed {
            continue;
        }
        let mut next = current.clone();
        next.insert(s);
        grow(net, next, seed, budget, nodes, visited, found)?;
    }
    Ok(())
}

/// Full classification of a siphon via the feasibility engine. Both signed
/// combinations are computed even when criticality already implies one must
/// exist, since callers need the specific witness kind.
pub fn classify_siphon(
    net: &ReactionNetwork,
    sigma: &BTreeSet<usize>,
) -> Result<SiphonClassification> {
    if !is_siphon(net, sigma)? {
        return Err(Error::NotASiphon);
    }
    let n = net.stoichiometric_matrix();
    let semiflow = semiflow_supported_in(&n, sigma)?;
    let drainable = signed_combination(&n, sigma, SignKind::Negative)?;
    let self_replicable = signed_combination(&n, sigma, SignKind::Positive)?;
    Ok(SiphonClassification {
        siphon: Siphon(sigma.clone()),
        minimal: is_minimal_siphon(net, sigma)?,
        critical: semiflow.is_none(),
        drainable,
        self_replicable,
        semiflow,
    })
}

/// Checks that every minimal siphon carries the support of a conservation
/// vector. A single violating minimal siphon is reported when it fails.
pub fn siphon_psemiflow_property(net: &ReactionNetwork) -> Result<PsfVerdict> {
    siphon_psemiflow_property_with_budget(net, DEFAULT_NODE_BUDGET)
}

pub fn siphon_psemiflow_property_with_budget(
    net: &ReactionNetwork,
    budget: u64,
) -> Result<PsfVerdict> {
    let n = net.stoichiometric_matrix();
    let mut witnesses = Vec::new();
    for siphon in minimal_siphons_with_budget(net, budget)? {
        match semiflow_supported_in(&n, siphon.members())? {
            Some(w) => witnesses.push((siphon, w)),
            None => {
                return Ok(PsfVerdict {
                    holds: false,
                    violating_siphon: Some(siphon),
                    witnesses,
                })
            }
        }
    }
    Ok(PsfVerdict {
        holds: true,
        violating_siphon: None,
        witnesses,
    })
}

/// Decides absence of drainable and self-replicable siphons directly via the
/// signed-combination route. Must agree with `siphon_psemiflow_property`.
pub fn no_drainable_or_self_replicable(net: &ReactionNetwork) -> Result<bool> {
    no_drainable_or_self_replicable_with_budget(net, DEFAULT_NODE_BUDGET)
}

pub fn no_drainable_or_self_replicable_with_budget(
    net: &ReactionNetwork,
    budget: u64,
) -> Result<bool> {
    let n = net.stoichiometric_matrix();
    for siphon in minimal_siphons_with_budget(net, budget)? {
        if signed_combination(&n, siphon.members(), SignKind::Negative)?.is_some()
            || signed_combination(&n, siphon.members(), SignKind::Positive)?.is_some()
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Drainability of minimal siphons via the signed-combination engine,
/// reported separately for the two signs.
pub fn has_drainable_siphon(net: &ReactionNetwork, budget: u64) -> Result<bool> {
    let n = net.stoichiometric_matrix();
    for siphon in minimal_siphons_with_budget(net, budget)? {
        if signed_combination(&n, siphon.members(), SignKind::Negative)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn has_self_replicable_siphon(net: &ReactionNetwork, budget: u64) -> Result<bool> {
    let n = net.stoichiometric_matrix();
    for siphon in minimal_siphons_with_budget(net, budget)? {
        if signed_combination(&n, siphon.members(), SignKind::Positive)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A pathway through nonnegative states realizing a reaction sequence: each
/// step fires one reaction inside a context vector that keeps states
/// nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GReactionPathway {
    pub states: Vec<Vec<Rational>>,
    pub steps: Vec<PathwayStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathwayStep {
    pub reaction: usize,
    pub context: Vec<Rational>,
}

impl GReactionPathway {
    pub fn net_change(&self) -> Vec<Rational> {
        let first = self.states.first().expect("nonempty pathway");
        let last = self.states.last().unwrap();
        last.iter().zip(first).map(|(a, b)| a - b).collect()
    }
}

/// Builds the canonical pathway for a reaction sequence: the first context
/// stockpiles every later reactant, and each step hands the leftover forward.
/// Repetition of reactions is allowed.
pub fn pathway_from_sequence(net: &ReactionNetwork, seq: &[usize]) -> GReactionPathway {
    assert!(!seq.is_empty(), "reaction sequence must be nonempty");
    let n = net.n_species();
    let complex_vec = |c: &crate::network::Complex| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for (s, coeff) in c.terms() {
            v[s] = coeff.clone();
        }
        v
    };
    let add = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    };
    let sub = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    };

    let reactants: Vec<Vec<Rational>> = seq.iter().map(|&j| complex_vec(net.reactant(j))).collect();
    let products: Vec<Vec<Rational>> = seq.iter().map(|&j| complex_vec(net.product(j))).collect();

    // w_1 carries all later reactants; w_{j+1} = y_j' + w_j - y_{j+1}
    let mut contexts: Vec<Vec<Rational>> = Vec::with_capacity(seq.len());
    let mut w = vec![Rational::zero(); n];
    for r in reactants.iter().skip(1) {
        w = add(&w, r);
    }
    contexts.push(w.clone());
    for j in 0..seq.len() - 1 {
        w = sub(&add(&products[j], &w), &reactants[j + 1]);
        contexts.push(w.clone());
    }

    let mut states = Vec::with_capacity(seq.len() + 1);
    states.push(add(&reactants[0], &contexts[0]));
    for j in 0..seq.len() {
        states.push(add(&products[j], &contexts[j]));
    }
    debug_assert!(states.iter().all(|s| s.iter().all(|x| !x.is_negative())));

    GReactionPathway {
        states,
        steps: seq
            .iter()
            .zip(&contexts)
            .map(|(&reaction, context)| PathwayStep {
                reaction,
                context: context.clone(),
            })
            .collect(),
    }
}
