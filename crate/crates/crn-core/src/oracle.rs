//! Reference implementations used to cross-check the production algorithms.
//! Everything here is deliberately naive and independent of the feasibility
//! engine and the branch-and-bound enumerator.

use std::collections::BTreeSet;

use num::Signed;

use crate::feasibility::SignKind;
use crate::network::ReactionNetwork;
use crate::rational::Rational;
use crate::siphon::pathway_from_sequence;

/// All inclusion-minimal siphons by filtering every nonempty species subset.
/// Only sensible for small species counts.
pub fn brute_force_minimal_siphons(net: &ReactionNetwork) -> Vec<BTreeSet<usize>> {
    let n = net.n_species();
    assert!(n <= 20, "subset enumeration oracle is capped at 20 species");
    let mut siphons: Vec<BTreeSet<usize>> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let sigma: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let ok = net.reactions().iter().enumerate().all(|(j, _)| {
            let product_hits = net.product(j).support().any(|s| sigma.contains(&s));
            !product_hits || net.reactant(j).support().any(|s| sigma.contains(&s))
        });
        if ok {
            siphons.push(sigma);
        }
    }
    siphons.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut minimal: Vec<BTreeSet<usize>> = Vec::new();
    for cand in siphons {
        if !minimal.iter().any(|m| m.is_subset(&cand)) {
            minimal.push(cand);
        }
    }
    minimal.sort();
    minimal
}

/// Searches reaction multisets of total size up to `max_total` whose summed
/// effect is strictly negative (or positive) on every coordinate of `sigma`.
/// Returns the multiset as per-reaction counts. The sequence order is
/// irrelevant to the summed effect, so multisets suffice.
pub fn exhaustive_signed_multiset(
    net: &ReactionNetwork,
    sigma: &BTreeSet<usize>,
    sign: SignKind,
    max_total: usize,
) -> Option<Vec<usize>> {
    let n = net.stoichiometric_matrix();
    let m = net.n_reactions();
    let mut counts = vec![0usize; m];
    let mut change = vec![Rational::from_integer(0.into()); net.n_species()];

    fn rec(
        net: &ReactionNetwork,
        n: &crate::rational::RationalMatrix,
        sigma: &BTreeSet<usize>,
        sign: SignKind,
        counts: &mut Vec<usize>,
        change: &mut Vec<Rational>,
        next: usize,
        remaining: usize,
    ) -> bool {
        let hit = !counts.iter().all(|&c| c == 0)
            && sigma.iter().all(|&i| match sign {
                SignKind::Negative => change[i].is_negative(),
                SignKind::Positive => change[i].is_positive(),
            });
        if hit {
            return true;
        }
        if remaining == 0 {
            return false;
        }
        for j in next..net.n_reactions() {
            counts[j] += 1;
            for i in 0..net.n_species() {
                change[i] = &change[i] + n.get(i, j);
            }
            if rec(net, n, sigma, sign, counts, change, j, remaining - 1) {
                return true;
            }
            counts[j] -= 1;
            for i in 0..net.n_species() {
                change[i] = &change[i] - n.get(i, j);
            }
        }
        false
    }

    if rec(net, &n, sigma, sign, &mut counts, &mut change, 0, max_total) {
        Some(counts)
    } else {
        None
    }
}

/// Re-validates a multiset answer through the pathway construction: expands
/// the counts into a sequence, builds the pathway, and checks the endpoint
/// difference has the demanded sign on `sigma`.
pub fn multiset_certified_by_pathway(
    net: &ReactionNetwork,
    sigma: &BTreeSet<usize>,
    sign: SignKind,
    counts: &[usize],
) -> bool {
    let mut seq = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            seq.push(j);
        }
    }
    if seq.is_empty() {
        return false;
    }
    let change = pathway_from_sequence(net, &seq).net_change();
    sigma.iter().all(|&i| match sign {
        SignKind::Negative => change[i].is_negative(),
        SignKind::Positive => change[i].is_positive(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siphon::minimal_siphons;

    #[test]
    fn brute_force_matches_branch_and_bound_on_fixture() {
        let g: ReactionNetwork = "E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0"
            .parse()
            .unwrap();
        let brute = brute_force_minimal_siphons(&g);
        let fast: Vec<BTreeSet<usize>> = minimal_siphons(&g)
            .unwrap()
            .into_iter()
            .map(|s| s.0)
            .collect();
        assert_eq!(brute, fast);
    }

    #[test]
    fn multiset_search_finds_lv_drain() {
        let g: ReactionNetwork = "N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0"
            .parse()
            .unwrap();
        let sigma: BTreeSet<usize> = [g.species_index("N").unwrap()].into_iter().collect();
        let counts = exhaustive_signed_multiset(&g, &sigma, SignKind::Negative, 6).unwrap();
        assert!(multiset_certified_by_pathway(
            &g,
            &sigma,
            SignKind::Negative,
            &counts
        ));
    }

    #[test]
    fn multiset_search_respects_sign() {
        let g: ReactionNetwork = "S -> 2S".parse().unwrap();
        let sigma: BTreeSet<usize> = [0].into_iter().collect();
        assert!(exhaustive_signed_multiset(&g, &sigma, SignKind::Negative, 6).is_none());
        assert!(exhaustive_signed_multiset(&g, &sigma, SignKind::Positive, 6).is_some());
    }
}
