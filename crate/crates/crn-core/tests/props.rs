//! Property tests over randomly generated networks and feasibility systems.

use std::collections::BTreeSet;

use proptest::prelude::*;

use crn_core::siphon::{is_siphon, max_siphon_within, pathway_from_sequence};
use crn_core::{build_network, rat, Feasibility, FeasibilityProblem, RawReaction, ReactionNetwork};

/// Strategy: small random reaction lists over a fixed species pool, filtered
/// through the validating constructor.
fn arb_network() -> impl Strategy<Value = ReactionNetwork> {
    let side = prop::collection::vec((0usize..5, 1i64..3), 0..3);
    prop::collection::vec((side.clone(), side), 1..8).prop_filter_map("valid network", |pairs| {
        let raw: Vec<RawReaction> = pairs
            .into_iter()
            .map(|(r, p)| RawReaction {
                reactant: r
                    .into_iter()
                    .map(|(s, c)| (format!("S{s}"), rat(c)))
                    .collect(),
                product: p
                    .into_iter()
                    .map(|(s, c)| (format!("S{s}"), rat(c)))
                    .collect(),
            })
            .collect();
        build_network(&raw).ok()
    })
}

proptest! {
    #[test]
    fn rebuild_round_trip(net in arb_network()) {
        let rebuilt = build_network(&net.raw_reactions()).unwrap();
        prop_assert_eq!(net, rebuilt);
    }

    #[test]
    fn scc_partition_refines_components(net in arb_network()) {
        let component = net.component_ids();
        for scc in net.strongly_connected_components() {
            let id = component[scc[0]];
            prop_assert!(scc.iter().all(|&c| component[c] == id));
        }
        // and the union of either partition is the complex set
        let total: usize = net.strongly_connected_components().iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, net.n_complexes());
    }

    #[test]
    fn pathway_states_stay_nonnegative_and_telescope(
        net in arb_network(),
        picks in prop::collection::vec(0usize..64, 1..6),
    ) {
        let seq: Vec<usize> = picks.iter().map(|&p| p % net.n_reactions()).collect();
        let pathway = pathway_from_sequence(&net, &seq);
        let n = net.stoichiometric_matrix();
        let mut expected = vec![rat(0); net.n_species()];
        for &j in &seq {
            for i in 0..net.n_species() {
                expected[i] = &expected[i] + n.get(i, j);
            }
        }
        prop_assert_eq!(pathway.net_change(), expected);
        for state in &pathway.states {
            prop_assert!(state.iter().all(|x| x >= &rat(0)));
        }
    }

    #[test]
    fn largest_siphon_within_is_a_siphon(net in arb_network(), mask in 1u32..32) {
        let subset: BTreeSet<usize> =
            (0..net.n_species()).filter(|i| mask & (1 << (i % 5)) != 0).collect();
        let found = max_siphon_within(&net, &subset);
        prop_assert!(found.is_subset(&subset));
        if !found.is_empty() {
            prop_assert!(is_siphon(&net, &found).unwrap());
        }
    }

    #[test]
    fn solver_answers_are_sound_and_find_planted_points(
        point in prop::collection::vec(0i64..5, 1..5),
        rows in prop::collection::vec(
            (prop::collection::vec(-3i64..4, 5), any::<bool>()),
            0..6,
        ),
    ) {
        // plant a nonnegative point and derive constraints it satisfies;
        // the solver must find some solution, and that solution must pass
        // an independent exact re-check
        let n = point.len();
        let planted: Vec<_> = point.iter().map(|&x| rat(x)).collect();
        let mut problem = FeasibilityProblem::new(n);
        let mut eq_rows = Vec::new();
        let mut ge_rows = Vec::new();
        for (coeffs, is_eq) in &rows {
            let coeffs: Vec<_> = coeffs.iter().take(n).map(|&c| rat(c)).collect();
            let value: crn_core::Rational = coeffs
                .iter()
                .zip(&planted)
                .map(|(a, b)| a * b)
                .sum();
            if *is_eq {
                problem.add_eq(coeffs.clone(), value.clone()).unwrap();
                eq_rows.push((coeffs, value));
            } else {
                // anything below the attained value keeps the point feasible
                let rhs = value - rat(1);
                problem.add_ge(coeffs.clone(), rhs.clone()).unwrap();
                ge_rows.push((coeffs, rhs));
            }
        }
        match problem.solve() {
            Feasibility::Feasible(x) => {
                prop_assert_eq!(x.len(), n);
                prop_assert!(x.iter().all(|v| v >= &rat(0)));
                for (coeffs, rhs) in &eq_rows {
                    let got: crn_core::Rational =
                        coeffs.iter().zip(&x).map(|(a, b)| a * b).sum();
                    prop_assert_eq!(&got, rhs);
                }
                for (coeffs, rhs) in &ge_rows {
                    let got: crn_core::Rational =
                        coeffs.iter().zip(&x).map(|(a, b)| a * b).sum();
                    prop_assert!(&got >= rhs);
                }
            }
            Feasibility::Infeasible => {
                prop_assert!(false, "planted point was declared infeasible");
            }
        }
    }

    #[test]
    fn solver_rejects_pinned_contradictions(
        coeffs in prop::collection::vec(1i64..5, 1..5),
        target in 1i64..6,
    ) {
        // sum of positively-weighted nonnegative variables cannot be both
        // at least `target` and equal to zero
        let n = coeffs.len();
        let weights: Vec<_> = coeffs.iter().map(|&c| rat(c)).collect();
        let mut problem = FeasibilityProblem::new(n);
        problem.add_ge(weights.clone(), rat(target)).unwrap();
        problem.add_eq(weights, rat(0)).unwrap();
        prop_assert_eq!(problem.solve(), Feasibility::Infeasible);
    }

    #[test]
    fn siphon_closure_along_paths(net in arb_network()) {
        // every complex on a directed path ending inside a siphon's
        // territory touches the siphon
        let touches = |c: usize, members: &BTreeSet<usize>| {
            net.complex(c).support().any(|s| members.contains(&s))
        };
        let adj = net.directed_adjacency();
        for siphon in crn_core::minimal_siphons(&net).unwrap() {
            // all complexes that can reach the siphon's territory
            let mut backward = vec![Vec::new(); net.n_complexes()];
            for (v, outs) in adj.iter().enumerate() {
                for &w in outs {
                    backward[w].push(v);
                }
            }
            let mut stack: Vec<usize> = (0..net.n_complexes())
                .filter(|&c| touches(c, siphon.members()))
                .collect();
            let mut reaches = vec![false; net.n_complexes()];
            for &c in &stack {
                reaches[c] = true;
            }
            while let Some(v) = stack.pop() {
                for &u in &backward[v] {
                    if !reaches[u] {
                        reaches[u] = true;
                        stack.push(u);
                    }
                }
            }
            for c in 0..net.n_complexes() {
                if reaches[c] {
                    prop_assert!(
                        touches(c, siphon.members()),
                        "complex on a path into the siphon misses it"
                    );
                }
            }
        }
    }
}
