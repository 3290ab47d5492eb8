//! Seeded random-network generators for the invariance, confluence and
//! oracle-equivalence suites. Deterministic for a fixed seed.

use rand::Rng;

use crate::network::{build_network, RawReaction, ReactionNetwork};
use crate::rational::{rat, Rational};

fn species_pool(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("S{i}")).collect()
}

fn random_side(
    rng: &mut impl Rng,
    names: &[String],
    max_support: usize,
    max_coeff: i64,
) -> Vec<(String, Rational)> {
    let support = rng.gen_range(0..=max_support);
    let mut picked: Vec<usize> = Vec::new();
    for _ in 0..support {
        let s = rng.gen_range(0..names.len());
        if !picked.contains(&s) {
            picked.push(s);
        }
    }
    picked
        .into_iter()
        .map(|s| (names[s].clone(), rat(rng.gen_range(1..=max_coeff))))
        .collect()
}

/// General sparse network with small integer coefficients.
pub fn random_network(
    rng: &mut impl Rng,
    max_species: usize,
    max_reactions: usize,
) -> ReactionNetwork {
    let n = rng.gen_range(2..=max_species.max(2));
    let names = species_pool(n);
    let m = rng.gen_range(1..=max_reactions.max(1));
    let mut raw: Vec<RawReaction> = Vec::new();
    let mut guard = 0;
    while raw.len() < m && guard < 50 * m {
        guard += 1;
        let reactant = random_side(rng, &names, 2, 2);
        let product = random_side(rng, &names, 2, 2);
        let candidate = RawReaction { reactant, product };
        if candidate.reactant == candidate.product {
            continue;
        }
        let mut attempt = raw.clone();
        attempt.push(candidate);
        if build_network(&attempt).is_ok() {
            raw = attempt;
        }
    }
    build_network(&raw).unwrap_or_else(|_| ReactionNetwork::empty())
}

/// Network guaranteed to contain removable transient species: plants chains
/// `a -> I_k -> b` whose fresh species appear only as their own complexes.
pub fn random_network_with_intermediates(
    rng: &mut impl Rng,
    max_species: usize,
    max_reactions: usize,
) -> ReactionNetwork {
    let base = random_network(rng, max_species, max_reactions);
    let mut raw = base.raw_reactions();
    if raw.is_empty() {
        return base;
    }
    let chains = rng.gen_range(1..=2);
    for c in 0..chains {
        let donor = raw[rng.gen_range(0..raw.len())].clone();
        if donor.reactant.is_empty() && donor.product.is_empty() {
            continue;
        }
        let name = format!("I{c}");
        raw.push(RawReaction {
            reactant: donor.reactant.clone(),
            product: vec![(name.clone(), rat(1))],
        });
        raw.push(RawReaction {
            reactant: vec![(name.clone(), rat(1))],
            product: donor.product.clone(),
        });
        if rng.gen_bool(0.3) {
            raw.push(RawReaction {
                reactant: vec![(name, rat(1))],
                product: donor.reactant.clone(),
            });
        }
    }
    dedupe(raw)
}

/// Network guaranteed to contain preserved species: plants reactions
/// `E + a -> E + b` with a fresh catalyst-style species.
pub fn random_network_with_catalysts(
    rng: &mut impl Rng,
    max_species: usize,
    max_reactions: usize,
) -> ReactionNetwork {
    let base = random_network(rng, max_species, max_reactions);
    let mut raw = base.raw_reactions();
    let names = species_pool(max_species.max(2));
    let gadgets = rng.gen_range(1..=2);
    for c in 0..gadgets {
        let e = (format!("K{c}"), rat(1));
        let a = names[rng.gen_range(0..names.len())].clone();
        let b = names[rng.gen_range(0..names.len())].clone();
        if a == b {
            continue;
        }
        raw.push(RawReaction {
            reactant: vec![e.clone(), (a.clone(), rat(1))],
            product: vec![e.clone(), (b.clone(), rat(1))],
        });
        if rng.gen_bool(0.5) {
            raw.push(RawReaction {
                reactant: vec![e.clone(), (b, rat(1))],
                product: vec![e.clone(), (a, rat(1))],
            });
        }
    }
    dedupe(raw)
}

/// Monomolecular network as a random digraph on species; avoiding the zero
/// complex keeps it conservative.
pub fn random_monomolecular(
    rng: &mut impl Rng,
    max_species: usize,
    max_reactions: usize,
    with_zero: bool,
) -> ReactionNetwork {
    let n = rng.gen_range(2..=max_species.max(2));
    let names = species_pool(n);
    let vertex = |rng: &mut dyn rand::RngCore, allow_zero: bool| -> Vec<(String, Rational)> {
        let hi = if allow_zero { n + 1 } else { n };
        let v = rng.gen_range(0..hi);
        if v == n {
            Vec::new()
        } else {
            vec![(names[v].clone(), rat(1))]
        }
    };
    let m = rng.gen_range(1..=max_reactions.max(1));
    let mut raw: Vec<RawReaction> = Vec::new();
    let mut guard = 0;
    while raw.len() < m && guard < 50 * m {
        guard += 1;
        let reactant = vertex(rng, with_zero);
        let product = vertex(rng, with_zero);
        let candidate = RawReaction { reactant, product };
        if candidate.reactant == candidate.product {
            continue;
        }
        let mut attempt = raw.clone();
        attempt.push(candidate);
        if build_network(&attempt).is_ok() {
            raw = attempt;
        }
    }
    build_network(&raw).unwrap_or_else(|_| ReactionNetwork::empty())
}

fn dedupe(raw: Vec<RawReaction>) -> ReactionNetwork {
    let mut seen: Vec<RawReaction> = Vec::new();
    for r in raw {
        let dup = seen.iter().any(|s| {
            let key = |side: &[(String, Rational)]| {
                let mut v: Vec<_> = side.to_vec();
                v.sort();
                v
            };
            key(&s.reactant) == key(&r.reactant) && key(&s.product) == key(&r.product)
        });
        if !dup {
            seen.push(r);
        }
    }
    build_network(&seen).unwrap_or_else(|_| ReactionNetwork::empty())
}
