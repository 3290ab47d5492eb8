//! Removal of intermediate species and catalysts, the primitive-reduction
//! driver, and certificate lifting from reduced networks back to the
//! originals (conservation laws, T-semiflows, siphons).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, Violations};
use crate::feasibility::{positive_kernel, positive_left_kernel};
use crate::network::{Complex, ReactionNetwork};
use crate::rational::{is_strictly_positive, is_zero_vec, rat, Rational};
use crate::siphon::{
    is_siphon, siphon_psemiflow_property_with_budget, Siphon, DEFAULT_NODE_BUDGET,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntermediateSet(pub BTreeSet<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalystSet(pub BTreeSet<usize>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Intermediates,
    Catalysts,
}

/// One removal step, with enough bookkeeping to lift certificates backwards.
#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub kind: StepKind,
    /// Removed species as ordinals of `before`, ascending.
    pub removed: Vec<usize>,
    pub before: ReactionNetwork,
    pub after: ReactionNetwork,
    /// For each species of `after`, its ordinal in `before`.
    pub after_species_origin: Vec<usize>,
    detail: StepDetail,
}

#[derive(Clone, Debug)]
enum StepDetail {
    Intermediates {
        /// Species that are neither removed nor surviving, ascending.
        vanished: Vec<usize>,
        /// Per connected component of `before`: a representative complex
        /// not belonging to the removed set.
        component_rep: Vec<usize>,
        /// Per entry of `removed`: its component id in `before`.
        component_of_removed: Vec<usize>,
    },
    Catalysts {
        /// Species of the implied subnetwork, as `before` ordinals in the
        /// subnetwork's own species order.
        sub_species: Vec<usize>,
        /// Removed species never appearing in a pure catalyst reaction.
        unused: Vec<usize>,
        /// Per reaction of `after`: the `before` reactions projecting to it.
        origins: Vec<Vec<usize>>,
        /// Reactions of `before` supported entirely on the removed set.
        pure_reactions: Vec<usize>,
    },
}

impl ReductionStep {
    pub fn removed_names(&self) -> Vec<String> {
        self.removed
            .iter()
            .map(|&s| self.before.species_name(s).to_string())
            .collect()
    }

    /// The species removed but absent from the reduced network and from the
    /// removed set itself (intermediate steps only).
    pub fn vanished_species(&self) -> &[usize] {
        match &self.detail {
            StepDetail::Intermediates { vanished, .. } => vanished,
            StepDetail::Catalysts { .. } => &[],
        }
    }

    /// For catalyst steps: the implied subnetwork the removed set spans.
    pub fn catalyst_subnetwork(&self) -> Result<ReactionNetwork> {
        let set: BTreeSet<usize> = self.removed.iter().copied().collect();
        self.before.implied_subnetwork(&set)
    }
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub original: ReactionNetwork,
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn final_network(&self) -> &ReactionNetwork {
        self.steps
            .last()
            .map(|s| &s.after)
            .unwrap_or(&self.original)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Ok,
    Invalid(Violations),
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validation::Ok)
    }
}

fn check_species(net: &ReactionNetwork, set: &BTreeSet<usize>) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for &s in set {
        if s >= net.n_species() {
            return Err(Error::UnknownSpecies(format!("#{s}")));
        }
    }
    Ok(())
}

/// Complex indices that are exactly the solo complex of a member of `set`.
fn solo_complexes_of(net: &ReactionNetwork, set: &BTreeSet<usize>) -> BTreeSet<usize> {
    net.complexes()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.solo_species().is_some_and(|s| set.contains(&s)))
        .map(|(i, _)| i)
        .collect()
}

/// Breadth-first reachability from `start` where interior vertices are
/// restricted to `interior`, reporting the set of endpoints outside it.
fn reachable_endpoints(
    adj: &[Vec<usize>],
    start: usize,
    interior: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut visited = BTreeSet::new();
    let mut queue = VecDeque::new();
    for &w in &adj[start] {
        queue.push_back(w);
    }
    while let Some(v) = queue.pop_front() {
        if !visited.insert(v) {
            continue;
        }
        if interior.contains(&v) {
            for &w in &adj[v] {
                queue.push_back(w);
            }
        } else {
            out.insert(v);
        }
    }
    out
}

fn has_entry_and_exit(
    net: &ReactionNetwork,
    forward: &[Vec<usize>],
    backward: &[Vec<usize>],
    y_solos: &BTreeSet<usize>,
    species: usize,
) -> (bool, bool) {
    let Some(solo) = net
        .complexes()
        .iter()
        .position(|c| c.solo_species() == Some(species))
    else {
        return (false, false);
    };
    let entry = !reachable_endpoints(backward, solo, y_solos).is_empty();
    let exit = !reachable_endpoints(forward, solo, y_solos).is_empty();
    (entry, exit)
}

/// Detector variant of the through-path test: anchors must be nonzero
/// complexes. Species fed and drained only through the zero complex stay in
/// place, which keeps detection independent of whether surrounding catalysts
/// happen to be removed first.
fn anchored_entry_and_exit(
    net: &ReactionNetwork,
    forward: &[Vec<usize>],
    backward: &[Vec<usize>],
    y_solos: &BTreeSet<usize>,
    species: usize,
) -> (bool, bool) {
    let Some(solo) = net
        .complexes()
        .iter()
        .position(|c| c.solo_species() == Some(species))
    else {
        return (false, false);
    };
    let nonzero = |set: BTreeSet<usize>| set.iter().any(|&c| !net.complex(c).is_zero());
    let entry = nonzero(reachable_endpoints(backward, solo, y_solos));
    let exit = nonzero(reachable_endpoints(forward, solo, y_solos));
    (entry, exit)
}

/// Checks that every complex is either supported away from the set or the
/// solo complex of a member, and that each member lies on a through-path
/// whose interior stays inside the set.
pub fn validate_intermediates(net: &ReactionNetwork, set: &BTreeSet<usize>) -> Result<Validation> {
    check_species(net, set)?;
    let mut violations = Vec::new();
    for c in net.complexes() {
        let touches = c.support().any(|s| set.contains(&s));
        if touches && !c.solo_species().is_some_and(|s| set.contains(&s)) {
            violations.push(format!(
                "complex {} mixes removed and kept species",
                c.display(net.species_names())
            ));
        }
    }
    if violations.is_empty() {
        let y_solos = solo_complexes_of(net, set);
        let forward = net.directed_adjacency();
        let backward = reverse_adjacency(&forward);
        for &s in set {
            let (entry, exit) = has_entry_and_exit(net, &forward, &backward, &y_solos, s);
            if !entry {
                violations.push(format!(
                    "{} has no entering path from a kept complex",
                    net.species_name(s)
                ));
            }
            if !exit {
                violations.push(format!(
                    "{} has no leaving path to a kept complex",
                    net.species_name(s)
                ));
            }
        }
    }
    Ok(if violations.is_empty() {
        Validation::Ok
    } else {
        Validation::Invalid(Violations(violations))
    })
}

fn reverse_adjacency(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            rev[w].push(v);
        }
    }
    rev
}

/// Finds a removable intermediate set, or `None`. Candidates are species
/// appearing only as their own coefficient-one complex. The candidate set is
/// pruned to a fixpoint of the anchored through-path test; mutually blocking
/// candidates (interchangeable pairs living in all-candidate components) are
/// then re-admitted one at a time, larger ordinal first. Sets whose removal
/// would collapse the whole network to the empty network are not reported,
/// so the detector deliberately stops short of full reducibility.
pub fn detect_intermediates(net: &ReactionNetwork) -> Option<IntermediateSet> {
    let n = net.n_species();
    let mut is_candidate = vec![true; n];
    for c in net.complexes() {
        let solo = c.solo_species();
        for (s, _) in c.terms() {
            if solo != Some(s) {
                is_candidate[s] = false;
            }
        }
    }
    let candidates: Vec<usize> = (0..n).filter(|&s| is_candidate[s]).collect();
    if candidates.is_empty() {
        return None;
    }

    let forward = net.directed_adjacency();
    let backward = reverse_adjacency(&forward);
    let violators = |set: &BTreeSet<usize>| -> Vec<usize> {
        let y_solos = solo_complexes_of(net, set);
        set.iter()
            .copied()
            .filter(|&s| {
                let (entry, exit) = anchored_entry_and_exit(net, &forward, &backward, &y_solos, s);
                !(entry && exit)
            })
            .collect()
    };

    let mut set: BTreeSet<usize> = candidates.iter().copied().collect();
    loop {
        let bad = violators(&set);
        if bad.is_empty() {
            break;
        }
        for v in bad {
            set.remove(&v);
        }
    }

    // re-admission of interchangeable candidates: only inside components made
    // entirely of candidate complexes, where the choice of survivor is the
    // only ambiguity
    let candidate_solos = solo_complexes_of(net, &candidates.iter().copied().collect());
    let component_ids = net.component_ids();
    let all_candidate_component = |s: usize| -> bool {
        let solo = net
            .complexes()
            .iter()
            .position(|c| c.solo_species() == Some(s))
            .expect("candidates have solo complexes");
        let comp = component_ids[solo];
        (0..net.n_complexes())
            .filter(|&c| component_ids[c] == comp)
            .all(|c| candidate_solos.contains(&c))
    };
    for &s in candidates.iter().rev() {
        if set.contains(&s) || !all_candidate_component(s) {
            continue;
        }
        let mut trial = set.clone();
        trial.insert(s);
        if violators(&trial).is_empty() {
            set = trial;
        }
    }
    if set.is_empty() {
        return None;
    }
    let (after, _) = remove_intermediates(net, &set).ok()?;
    if after.is_empty() {
        return None;
    }
    Some(IntermediateSet(set))
}

/// Removes a validated intermediate set: direct reactions between kept
/// complexes survive, and every pair of distinct kept complexes joined by a
/// path through removed complexes collapses into a fresh reaction.
pub fn remove_intermediates(
    net: &ReactionNetwork,
    set: &BTreeSet<usize>,
) -> Result<(ReactionNetwork, ReductionStep)> {
    match validate_intermediates(net, set)? {
        Validation::Ok => {}
        Validation::Invalid(v) => return Err(Error::InvalidIntermediates(v.to_string())),
    }
    let y_solos = solo_complexes_of(net, set);
    let forward = net.directed_adjacency();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for r in net.reactions() {
        if !y_solos.contains(&r.reactant)
            && !y_solos.contains(&r.product)
            && seen.insert((r.reactant, r.product))
        {
            pairs.push((r.reactant, r.product));
        }
    }
    // collapse through-paths: source complex, first hop into the removed
    // zone, then reachability within it
    let sources: BTreeSet<usize> = net
        .reactions()
        .iter()
        .filter(|r| !y_solos.contains(&r.reactant) && y_solos.contains(&r.product))
        .map(|r| r.reactant)
        .collect();
    for &y in &sources {
        let mut inside = BTreeSet::new();
        let mut queue: VecDeque<usize> = forward[y]
            .iter()
            .copied()
            .filter(|c| y_solos.contains(c))
            .collect();
        let mut targets = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            if !inside.insert(v) {
                continue;
            }
            for &w in &forward[v] {
                if y_solos.contains(&w) {
                    queue.push_back(w);
                } else {
                    targets.insert(w);
                }
            }
        }
        for t in targets {
            if t != y && seen.insert((y, t)) {
                pairs.push((y, t));
            }
        }
    }

    let complex_pairs: Vec<(Complex, Complex)> = pairs
        .iter()
        .map(|&(a, b)| (net.complex(a).clone(), net.complex(b).clone()))
        .collect();
    let after = ReactionNetwork::from_complex_pairs(net.species_names().to_vec(), complex_pairs)?;

    let after_species_origin: Vec<usize> = after
        .species_names()
        .iter()
        .map(|n| net.species_index(n).expect("species inherited from parent"))
        .collect();
    let survivors: BTreeSet<usize> = after_species_origin.iter().copied().collect();
    let vanished: Vec<usize> = (0..net.n_species())
        .filter(|s| !set.contains(s) && !survivors.contains(s))
        .collect();

    let component_ids = net.component_ids();
    let n_components = net.connected_components().len();
    let mut component_rep = vec![usize::MAX; n_components];
    for c in 0..net.n_complexes() {
        if !y_solos.contains(&c) && component_rep[component_ids[c]] == usize::MAX {
            component_rep[component_ids[c]] = c;
        }
    }
    let removed: Vec<usize> = set.iter().copied().collect();
    let component_of_removed: Vec<usize> = removed
        .iter()
        .map(|&s| {
            let solo = net
                .complexes()
                .iter()
                .position(|c| c.solo_species() == Some(s))
                .expect("validated intermediate has a solo complex");
            component_ids[solo]
        })
        .collect();
    // every removed species' component keeps a representative
    debug_assert!(component_of_removed
        .iter()
        .all(|&k| component_rep[k] != usize::MAX));

    let step = ReductionStep {
        kind: StepKind::Intermediates,
        removed,
        before: net.clone(),
        after: after.clone(),
        after_species_origin,
        detail: StepDetail::Intermediates {
            vanished,
            component_rep,
            component_of_removed,
        },
    };
    Ok((after, step))
}

/// Checks the catalyst conditions: per reaction the removed-part vectors of
/// reactant and product agree, or the reaction is supported entirely on the
/// removed set; and the implied subnetwork passes the siphon/P-semiflow
/// property.
pub fn validate_catalysts(net: &ReactionNetwork, set: &BTreeSet<usize>) -> Result<Validation> {
    check_species(net, set)?;
    let mut violations = Vec::new();
    for (j, _) in net.reactions().iter().enumerate() {
        let reactant = net.reactant(j);
        let product = net.product(j);
        let e_equal = set.iter().all(|&s| reactant.coeff(s) == product.coeff(s));
        let pure = reactant
            .support()
            .chain(product.support())
            .all(|s| set.contains(&s));
        if !e_equal && !pure {
            violations.push(format!(
                "reaction {} -> {} neither preserves the removed part nor is supported on it",
                reactant.display(net.species_names()),
                product.display(net.species_names())
            ));
        }
    }
    if violations.is_empty() {
        let sub = net.implied_subnetwork(set)?;
        let verdict = siphon_psemiflow_property_with_budget(&sub, DEFAULT_NODE_BUDGET)?;
        if !verdict.holds {
            let sig = verdict
                .violating_siphon
                .expect("failing verdict names a siphon");
            violations.push(format!(
                "implied subnetwork has the critical siphon {{{}}}",
                sig.names(&sub).join(", ")
            ));
        }
    }
    Ok(if violations.is_empty() {
        Validation::Ok
    } else {
        Validation::Invalid(Violations(violations))
    })
}

/// Finds a removable catalyst set, or `None`. Seeds are species preserved
/// with positive equal coefficients in at least one reaction and never
/// transformed alongside a preserved species; the seed set is then pruned
/// until reactions that transform a member are supported entirely inside the
/// set. Richer catalyst shapes are accepted by `validate_catalysts` on
/// user-supplied sets but not searched for.
pub fn detect_catalysts(net: &ReactionNetwork) -> Result<Option<CatalystSet>> {
    let n = net.n_species();
    let m = net.n_reactions();
    if n == 0 {
        return Ok(None);
    }
    let eq_pos = |s: usize, j: usize| {
        let a = net.reactant(j).coeff(s);
        let b = net.product(j).coeff(s);
        a == b && a.is_positive()
    };
    let uneq = |s: usize, j: usize| net.reactant(j).coeff(s) != net.product(j).coeff(s);
    let support = |j: usize| -> BTreeSet<usize> {
        net.reactant(j)
            .support()
            .chain(net.product(j).support())
            .collect()
    };

    let mut set: BTreeSet<usize> = (0..n)
        .filter(|&s| {
            let acts = (0..m).any(|j| eq_pos(s, j));
            let rejected = (0..m).any(|j| uneq(s, j) && support(j).iter().any(|&t| eq_pos(t, j)));
            acts && !rejected
        })
        .collect();
    loop {
        let bad: Vec<usize> = set
            .iter()
            .copied()
            .filter(|&s| (0..m).any(|j| uneq(s, j) && !support(j).is_subset(&set)))
            .collect();
        if bad.is_empty() {
            break;
        }
        for s in bad {
            set.remove(&s);
        }
    }
    if set.is_empty() {
        return Ok(None);
    }
    match validate_catalysts(net, &set)? {
        Validation::Ok => {}
        Validation::Invalid(_) => return Ok(None),
    }
    let (after, _) = remove_catalysts(net, &set)?;
    if after.is_empty() {
        return Ok(None);
    }
    Ok(Some(CatalystSet(set)))
}

/// Removes a validated catalyst set by projecting every reaction onto the
/// kept coordinates. Reactions supported entirely on the removed set are
/// dropped; coinciding projections are merged with their origins recorded.
pub fn remove_catalysts(
    net: &ReactionNetwork,
    set: &BTreeSet<usize>,
) -> Result<(ReactionNetwork, ReductionStep)> {
    match validate_catalysts(net, set)? {
        Validation::Ok => {}
        Validation::Invalid(v) => return Err(Error::InvalidCatalysts(v.to_string())),
    }
    let kept: BTreeSet<usize> = (0..net.n_species()).filter(|s| !set.contains(s)).collect();

    let mut pure_reactions = Vec::new();
    let mut projected: Vec<(Complex, Complex)> = Vec::new();
    let mut origins: Vec<Vec<usize>> = Vec::new();
    let mut index: BTreeMap<(Complex, Complex), usize> = BTreeMap::new();
    for (j, _) in net.reactions().iter().enumerate() {
        let a = net.reactant(j).restrict(&kept);
        let b = net.product(j).restrict(&kept);
        if a.is_zero() && b.is_zero() {
            pure_reactions.push(j);
            continue;
        }
        if a == b {
            // ruled out by the preserved-part condition
            return Err(Error::InvalidCatalysts(format!(
                "projection of {} -> {} collapses to a self-loop",
                net.reactant(j).display(net.species_names()),
                net.product(j).display(net.species_names())
            )));
        }
        match index.get(&(a.clone(), b.clone())) {
            Some(&k) => origins[k].push(j),
            None => {
                index.insert((a.clone(), b.clone()), projected.len());
                projected.push((a, b));
                origins.push(vec![j]);
            }
        }
    }

    let after = ReactionNetwork::from_complex_pairs(net.species_names().to_vec(), projected)?;
    let after_species_origin: Vec<usize> = after
        .species_names()
        .iter()
        .map(|n| net.species_index(n).expect("species inherited from parent"))
        .collect();
    // the kept species always all survive the projection
    debug_assert_eq!(after_species_origin.len(), kept.len());

    let sub = net.implied_subnetwork(set)?;
    let sub_species: Vec<usize> = sub
        .species_names()
        .iter()
        .map(|n| net.species_index(n).unwrap())
        .collect();
    let in_sub: BTreeSet<usize> = sub_species.iter().copied().collect();
    let unused: Vec<usize> = set
        .iter()
        .copied()
        .filter(|s| !in_sub.contains(s))
        .collect();

    let step = ReductionStep {
        kind: StepKind::Catalysts,
        removed: set.iter().copied().collect(),
        before: net.clone(),
        after: after.clone(),
        after_species_origin,
        detail: StepDetail::Catalysts {
            sub_species,
            unused,
            origins,
            pure_reactions,
        },
    };
    Ok((after, step))
}

/// Alternates intermediate and catalyst removal until neither detector finds
/// anything. The result is deterministic; the seeded variant randomizes the
/// removal order for confluence testing.
pub fn primitive_reduction(net: &ReactionNetwork) -> Result<(ReactionNetwork, ReductionTrace)> {
    let mut current = net.clone();
    let mut steps = Vec::new();
    loop {
        if let Some(y) = detect_intermediates(&current) {
            let (next, step) = remove_intermediates(&current, &y.0)?;
            steps.push(step);
            current = next;
            continue;
        }
        if let Some(e) = detect_catalysts(&current)? {
            let (next, step) = remove_catalysts(&current, &e.0)?;
            steps.push(step);
            current = next;
            continue;
        }
        break;
    }
    Ok((
        current,
        ReductionTrace {
            original: net.clone(),
            steps,
        },
    ))
}

/// Randomized-order variant for confluence testing: flips which removal kind
/// is tried first and removes each detected set as a shuffled sequence of
/// sub-batches. Every detected set is still removed completely before the
/// detectors run again, which is the regime the one-at-a-time and
/// order-commutation results cover.
pub fn primitive_reduction_seeded(
    net: &ReactionNetwork,
    seed: u64,
) -> Result<(ReactionNetwork, ReductionTrace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = net.clone();
    let mut steps = Vec::new();
    'outer: loop {
        let int_first: bool = rng.gen();
        for attempt in 0..2 {
            let do_int = (attempt == 0) == int_first;
            if do_int {
                if let Some(y) = detect_intermediates(&current) {
                    let batches: Vec<Vec<String>> = random_partition(&mut rng, &y.0)
                        .into_iter()
                        .map(|b| {
                            b.iter()
                                .map(|&s| current.species_name(s).to_string())
                                .collect()
                        })
                        .collect();
                    for names in batches {
                        let local: BTreeSet<usize> = names
                            .iter()
                            .map(|n| {
                                current
                                    .species_index(n)
                                    .expect("pending intermediates survive earlier batches")
                            })
                            .collect();
                        let (next, step) = remove_intermediates(&current, &local)?;
                        steps.push(step);
                        current = next;
                    }
                    continue 'outer;
                }
            } else if let Some(e) = detect_catalysts(&current)? {
                let mut groups = cooccurrence_groups(&current, &e.0);
                shuffle(&mut rng, &mut groups);
                if rng.gen_bool(0.4) {
                    // whole-set removal in one step
                    groups = vec![e.0.clone()];
                }
                let batches: Vec<Vec<String>> = groups
                    .into_iter()
                    .map(|b| {
                        b.iter()
                            .map(|&s| current.species_name(s).to_string())
                            .collect()
                    })
                    .collect();
                for names in batches {
                    let local: BTreeSet<usize> = names
                        .iter()
                        .map(|n| {
                            current
                                .species_index(n)
                                .expect("pending catalysts survive earlier groups")
                        })
                        .collect();
                    let (next, step) = remove_catalysts(&current, &local)?;
                    steps.push(step);
                    current = next;
                }
                continue 'outer;
            }
        }
        break;
    }
    Ok((
        current,
        ReductionTrace {
            original: net.clone(),
            steps,
        },
    ))
}

/// Splits a set into a shuffled sequence of nonempty batches.
fn random_partition(rng: &mut ChaCha8Rng, set: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut members: Vec<usize> = set.iter().copied().collect();
    shuffle(rng, &mut members);
    let parts = if members.len() < 2 || rng.gen_bool(0.4) {
        1
    } else {
        rng.gen_range(2..=members.len().min(3))
    };
    let mut batches: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); parts];
    for (k, s) in members.into_iter().enumerate() {
        batches[k % parts].insert(s);
    }
    batches.retain(|b| !b.is_empty());
    batches
}

fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

fn cooccurrence_groups(net: &ReactionNetwork, set: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let members: Vec<usize> = set.iter().copied().collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    for (j, _) in net.reactions().iter().enumerate() {
        let supp: Vec<usize> = net
            .reactant(j)
            .support()
            .chain(net.product(j).support())
            .filter(|s| set.contains(s))
            .collect();
        let pure = net
            .reactant(j)
            .support()
            .chain(net.product(j).support())
            .all(|s| set.contains(&s));
        if pure && supp.len() > 1 {
            let first = pos[&supp[0]];
            for &s in &supp[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, pos[&s]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (k, &s) in members.iter().enumerate() {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().insert(s);
    }
    groups.into_values().collect()
}

/// Result of lifting a conservation law: the vector over the original
/// species, whether it is strictly positive, and whether strictness may have
/// been lost to a zero complex acting as a component representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedConservationLaw {
    pub vector: Vec<Rational>,
    pub strictly_positive: bool,
    pub zero_complex_obstruction: bool,
}

/// Input for `lift_conservation_law`, matching the step kind.
#[derive(Clone, Debug)]
pub enum ConservationInput {
    /// A conservation law of the reduced network plus a free choice over the
    /// species that vanished with the intermediates.
    Intermediate {
        omega_star: Vec<Rational>,
        x: Vec<Rational>,
    },
    /// A conservation law of the reduced network, one of the catalyst
    /// subnetwork (indexed like `catalyst_subnetwork()`), and a free choice
    /// over catalysts outside that subnetwork.
    Catalyst {
        omega_star: Vec<Rational>,
        omega_sub: Vec<Rational>,
        free: Vec<Rational>,
    },
}

pub fn lift_conservation_law(
    step: &ReductionStep,
    input: &ConservationInput,
) -> Result<LiftedConservationLaw> {
    let before_n = step.before.stoichiometric_matrix();
    let after_n = step.after.stoichiometric_matrix();
    let vector = match (&step.detail, input) {
        (
            StepDetail::Intermediates {
                vanished,
                component_rep,
                component_of_removed,
            },
            ConservationInput::Intermediate { omega_star, x },
        ) => {
            if omega_star.len() != step.after.n_species() {
                return Err(Error::DimensionMismatch {
                    expected: step.after.n_species(),
                    got: omega_star.len(),
                });
            }
            if x.len() != vanished.len() {
                return Err(Error::DimensionMismatch {
                    expected: vanished.len(),
                    got: x.len(),
                });
            }
            if !is_zero_vec(&after_n.left_mul(omega_star)) {
                return Err(Error::NotAConservationLaw);
            }
            let mut omega = vec![Rational::zero(); step.before.n_species()];
            for (k, &orig) in step.after_species_origin.iter().enumerate() {
                omega[orig] = omega_star[k].clone();
            }
            for (k, &orig) in vanished.iter().enumerate() {
                omega[orig] = x[k].clone();
            }
            // removed species weigh as much as their component representative
            for (k, &s) in step.removed.iter().enumerate() {
                let rep = component_rep[component_of_removed[k]];
                let value = step
                    .before
                    .complex(rep)
                    .terms()
                    .fold(Rational::zero(), |acc, (sp, c)| acc + c * &omega[sp]);
                omega[s] = value;
            }
            omega
        }
        (
            StepDetail::Catalysts {
                sub_species,
                unused,
                ..
            },
            ConservationInput::Catalyst {
                omega_star,
                omega_sub,
                free,
            },
        ) => {
            if omega_star.len() != step.after.n_species() {
                return Err(Error::DimensionMismatch {
                    expected: step.after.n_species(),
                    got: omega_star.len(),
                });
            }
            if omega_sub.len() != sub_species.len() {
                return Err(Error::DimensionMismatch {
                    expected: sub_species.len(),
                    got: omega_sub.len(),
                });
            }
            if free.len() != unused.len() {
                return Err(Error::DimensionMismatch {
                    expected: unused.len(),
                    got: free.len(),
                });
            }
            if !is_zero_vec(&after_n.left_mul(omega_star)) {
                return Err(Error::NotAConservationLaw);
            }
            let sub = step.catalyst_subnetwork()?;
            if !is_zero_vec(&sub.stoichiometric_matrix().left_mul(omega_sub)) {
                return Err(Error::NotAConservationLaw);
            }
            let mut omega = vec![Rational::zero(); step.before.n_species()];
            for (k, &orig) in step.after_species_origin.iter().enumerate() {
                omega[orig] = omega_star[k].clone();
            }
            for (k, &orig) in sub_species.iter().enumerate() {
                omega[orig] = omega_sub[k].clone();
            }
            for (k, &orig) in unused.iter().enumerate() {
                omega[orig] = free[k].clone();
            }
            omega
        }
        _ => {
            return Err(Error::NotAConservationLaw);
        }
    };
    if !is_zero_vec(&before_n.left_mul(&vector)) {
        return Err(Error::NotAConservationLaw);
    }
    Ok(LiftedConservationLaw {
        strictly_positive: is_strictly_positive(&vector),
        zero_complex_obstruction: step.kind == StepKind::Intermediates
            && step.before.zero_complex_index().is_some(),
        vector,
    })
}

/// Lifts a strictly positive T-semiflow of the reduced network to one of the
/// original. Intermediate steps are decomposed into single-species removals
/// and lifted one at a time; catalyst steps spread each reduced weight evenly
/// over its originating reactions and require the catalyst subnetwork to be
/// conservative.
pub fn lift_t_semiflow(step: &ReductionStep, v_star: &[Rational]) -> Result<Vec<Rational>> {
    if v_star.len() != step.after.n_reactions() {
        return Err(Error::DimensionMismatch {
            expected: step.after.n_reactions(),
            got: v_star.len(),
        });
    }
    if !is_strictly_positive(v_star)
        || !is_zero_vec(&step.after.stoichiometric_matrix().mul_vec(v_star))
    {
        return Err(Error::NotATSemiflow);
    }
    let v = match &step.detail {
        StepDetail::Catalysts {
            sub_species: _,
            unused: _,
            origins,
            pure_reactions,
        } => {
            let sub = step.catalyst_subnetwork()?;
            debug_assert_eq!(sub.n_reactions(), pure_reactions.len());
            let n_sub = sub.stoichiometric_matrix();
            if positive_left_kernel(&n_sub).is_none() {
                return Err(Error::CatalystSubnetworkNotConservative);
            }
            let v_sub = positive_kernel(&n_sub)
                .expect("conservative subnetwork with the siphon property is consistent");
            let mut v = vec![Rational::zero(); step.before.n_reactions()];
            for (j, origs) in origins.iter().enumerate() {
                let share = &v_star[j] / rat(origs.len() as i64);
                for &oj in origs {
                    v[oj] = share.clone();
                }
            }
            for (k, &pj) in pure_reactions.iter().enumerate() {
                v[pj] = v_sub.vector.entries[k].clone();
            }
            v
        }
        StepDetail::Intermediates { .. } => {
            // peel one intermediate at a time, largest ordinal first
            let names: Vec<String> = step
                .removed
                .iter()
                .map(|&s| step.before.species_name(s).to_string())
                .collect();
            let mut chain: Vec<ReactionNetwork> = vec![step.before.clone()];
            for name in names.iter().rev() {
                let current = chain.last().unwrap();
                let idx = current
                    .species_index(name)
                    .expect("intermediate survives until its own removal");
                let single: BTreeSet<usize> = [idx].into_iter().collect();
                let (next, _) = remove_intermediates(current, &single)?;
                chain.push(next);
            }
            let last = chain.last().unwrap();
            assert!(
                last.eq_up_to_ordering(&step.after),
                "single-species removal chain must reproduce the bulk removal"
            );
            let mut v = map_reaction_vector(&step.after, v_star, last);
            for k in (0..names.len()).rev() {
                let big = &chain[k];
                let small = &chain[k + 1];
                let y_idx = big.species_index(&names[names.len() - 1 - k]).unwrap();
                v = lift_single_intermediate(big, small, y_idx, &v);
            }
            v
        }
    };
    debug_assert!(is_strictly_positive(&v));
    debug_assert!(is_zero_vec(
        &step.before.stoichiometric_matrix().mul_vec(&v)
    ));
    Ok(v)
}

type PairKey = (BTreeMap<String, Rational>, BTreeMap<String, Rational>);

fn pair_key(net: &ReactionNetwork, j: usize) -> PairKey {
    let named = |c: &Complex| -> BTreeMap<String, Rational> {
        c.terms()
            .map(|(s, v)| (net.species_name(s).to_string(), v.clone()))
            .collect()
    };
    (named(net.reactant(j)), named(net.product(j)))
}

/// Transports a reaction-indexed vector between two renderings of the same
/// network whose reaction orders may differ.
fn map_reaction_vector(
    from: &ReactionNetwork,
    v: &[Rational],
    to: &ReactionNetwork,
) -> Vec<Rational> {
    let mut index: HashMap<PairKey, usize> = HashMap::new();
    for j in 0..to.n_reactions() {
        index.insert(pair_key(to, j), j);
    }
    let mut out = vec![Rational::zero(); to.n_reactions()];
    for j in 0..from.n_reactions() {
        let k = index[&pair_key(from, j)];
        out[k] = v[j].clone();
    }
    out
}

/// The single-intermediate weight transfer: collapsed through-pairs push
/// their weight onto both halves of the path, weight on reactions that are
/// simultaneously direct and collapsed is split evenly, and complexes joined
/// to the intermediate in both directions get one extra unit on each arrow.
fn lift_single_intermediate(
    big: &ReactionNetwork,
    small: &ReactionNetwork,
    y_idx: usize,
    v_small: &[Rational],
) -> Vec<Rational> {
    let y_solo = big
        .complexes()
        .iter()
        .position(|c| c.solo_species() == Some(y_idx))
        .expect("intermediate has a solo complex");

    // small-network pair lookup
    let mut small_index: HashMap<PairKey, usize> = HashMap::new();
    for j in 0..small.n_reactions() {
        small_index.insert(pair_key(small, j), j);
    }
    let big_pair_named = |a: usize, b: usize| -> PairKey {
        let named = |c: &Complex| -> BTreeMap<String, Rational> {
            c.terms()
                .map(|(s, v)| (big.species_name(s).to_string(), v.clone()))
                .collect()
        };
        (named(big.complex(a)), named(big.complex(b)))
    };

    let direct: BTreeSet<(usize, usize)> = big
        .reactions()
        .iter()
        .filter(|r| r.reactant != y_solo && r.product != y_solo)
        .map(|r| (r.reactant, r.product))
        .collect();
    let into_y: Vec<usize> = big
        .reactions()
        .iter()
        .filter(|r| r.product == y_solo)
        .map(|r| r.reactant)
        .collect();
    let from_y: Vec<usize> = big
        .reactions()
        .iter()
        .filter(|r| r.reactant == y_solo)
        .map(|r| r.product)
        .collect();
    let bidirectional: BTreeSet<usize> = into_y
        .iter()
        .copied()
        .filter(|c| from_y.contains(c))
        .collect();
    let collapsed = |a: usize, b: usize| a != b && into_y.contains(&a) && from_y.contains(&b);

    let weight_for_pair = |a: usize, b: usize| -> Rational {
        match small_index.get(&big_pair_named(a, b)) {
            Some(&j) => {
                if direct.contains(&(a, b)) && collapsed(a, b) {
                    &v_small[j] / rat(2)
                } else {
                    v_small[j].clone()
                }
            }
            None => Rational::zero(),
        }
    };

    let mut v_big = vec![Rational::zero(); big.n_reactions()];
    for (j, r) in big.reactions().iter().enumerate() {
        if r.product == y_solo {
            // arrow into the intermediate: collect all collapsed pairs out of
            // this source
            let a = r.reactant;
            let mut w = Rational::zero();
            for &b in &from_y {
                if collapsed(a, b) {
                    w += weight_for_pair(a, b);
                }
            }
            if bidirectional.contains(&a) {
                w += rat(1);
            }
            v_big[j] = w;
        } else if r.reactant == y_solo {
            let b = r.product;
            let mut w = Rational::zero();
            for &a in &into_y {
                if collapsed(a, b) {
                    w += weight_for_pair(a, b);
                }
            }
            if bidirectional.contains(&b) {
                w += rat(1);
            }
            v_big[j] = w;
        } else {
            v_big[j] = weight_for_pair(r.reactant, r.product);
        }
    }
    debug_assert!(
        is_zero_vec(&big.stoichiometric_matrix().mul_vec(&v_big)),
        "single-intermediate lift must stay in the kernel"
    );
    v_big
}

/// Lifts a siphon of the reduced network to one of the original: for
/// intermediate steps the removed species with a through-path into the
/// siphon's territory join it; for catalyst steps the set embeds unchanged.
pub fn lift_siphon(step: &ReductionStep, sigma_star: &Siphon) -> Result<Siphon> {
    if !is_siphon(&step.after, sigma_star.members())? {
        return Err(Error::NotASiphon);
    }
    let mut sigma: BTreeSet<usize> = sigma_star
        .members()
        .iter()
        .map(|&k| step.after_species_origin[k])
        .collect();
    if step.kind == StepKind::Intermediates {
        let removed: BTreeSet<usize> = step.removed.iter().copied().collect();
        let y_solos = solo_complexes_of(&step.before, &removed);
        let forward = step.before.directed_adjacency();
        for &y in &step.removed {
            let solo = step
                .before
                .complexes()
                .iter()
                .position(|c| c.solo_species() == Some(y))
                .unwrap();
            let endpoints = reachable_endpoints(&forward, solo, &y_solos);
            let feeds = endpoints
                .iter()
                .any(|&c| step.before.complex(c).support().any(|s| sigma.contains(&s)));
            if feeds {
                sigma.insert(y);
            }
        }
    }
    debug_assert!(is_siphon(&step.before, &sigma).unwrap_or(false));
    Ok(Siphon(sigma))
}

/// Projects a siphon of the original network onto the reduced one by
/// intersecting with the surviving species. `None` when the intersection is
/// empty, or (for catalyst steps) when it fails the siphon rule.
pub fn project_siphon(step: &ReductionStep, sigma: &Siphon) -> Result<Option<Siphon>> {
    if !is_siphon(&step.before, sigma.members())? {
        return Err(Error::NotASiphon);
    }
    let projected: BTreeSet<usize> = step
        .after_species_origin
        .iter()
        .enumerate()
        .filter(|(_, orig)| sigma.members().contains(orig))
        .map(|(k, _)| k)
        .collect();
    if projected.is_empty() {
        return Ok(None);
    }
    match step.kind {
        StepKind::Intermediates => {
            debug_assert!(is_siphon(&step.after, &projected).unwrap_or(false));
            Ok(Some(Siphon(projected)))
        }
        StepKind::Catalysts => {
            if is_siphon(&step.after, &projected)? {
                Ok(Some(Siphon(projected)))
            } else {
                Ok(None)
            }
        }
    }
}
