//! Reduction chains for the three worked model fixtures, checked stage by
//! stage against the expected networks, plus detector behavior on the
//! terminal networks.

use std::collections::BTreeSet;

use crn_core::reduction::{
    detect_catalysts, detect_intermediates, primitive_reduction, remove_catalysts,
    remove_intermediates, validate_catalysts, validate_intermediates,
};
use crn_core::{ReactionNetwork, StepKind};

fn net(src: &str) -> ReactionNetwork {
    src.parse().unwrap()
}

fn ids(net: &ReactionNetwork, names: &[&str]) -> BTreeSet<usize> {
    names
        .iter()
        .map(|n| net.species_index(n).unwrap())
        .collect()
}

fn names_of(net: &ReactionNetwork, set: &BTreeSet<usize>) -> BTreeSet<String> {
    set.iter()
        .map(|&s| net.species_name(s).to_string())
        .collect()
}

fn ubiquitination() -> ReactionNetwork {
    net(
        "B <-> B_ub^d; H <-> H_ub; B + R <-> Z; Z <-> Z_ub; Z_ub <-> B + R_ub^a; \
         R_ub^a -> R_ub; R_ub <-> R; R <-> R_ub^d",
    )
}

fn wnt() -> ReactionNetwork {
    net("Y_a + X <-> C_YX; C_YX -> Y_a; \
         Y_i + P <-> C_YP; C_YP -> Y_a + P; \
         Y_an + D_an <-> C_YD_n; C_YD_n -> Y_in + D_an; \
         0 <-> X; X <-> X_n; X_n -> 0; \
         D_i <-> D_a; D_a <-> D_an; \
         Y_in + P_n <-> C_YP_n; C_YP_n -> Y_an + P_n; \
         Y_an + X_n <-> C_YX_n; C_YX_n -> Y_an; \
         Y_a + D_a <-> C_YD; C_YD -> Y_i + D_a; \
         Y_i <-> Y_in; \
         X_n + T <-> C_XT")
}

fn monomer_dimer() -> ReactionNetwork {
    net("X_1 -> X_1 + P_1; P_1 -> 0; X_2 + P_1 <-> X_2P_1; \
         X_2 -> X_2 + P_2; P_2 -> 0; X_1 + P_2P_2 <-> X_1P_2P_2; 2P_2 <-> P_2P_2")
}

#[test]
fn ubiquitination_chain() {
    let g = ubiquitination();

    // the published removable set is valid, as is the variant swapping H for H_ub
    let published = ids(&g, &["B_ub^d", "H", "R_ub", "R_ub^d", "Z", "Z_ub"]);
    assert!(validate_intermediates(&g, &published).unwrap().is_ok());
    let variant = ids(&g, &["B_ub^d", "H_ub", "R_ub", "R_ub^d", "Z", "Z_ub"]);
    assert!(validate_intermediates(&g, &variant).unwrap().is_ok());

    let detected = detect_intermediates(&g).expect("intermediates detected");
    let got = names_of(&g, &detected.0);
    for required in ["B_ub^d", "R_ub", "R_ub^d", "Z", "Z_ub"] {
        assert!(got.contains(required), "missing {required}");
    }
    // exactly one of the interchangeable pair, larger ordinal preferred
    assert!(got.contains("H_ub") && !got.contains("H"));

    let (stage1, step1) = remove_intermediates(&g, &detected.0).unwrap();
    assert!(stage1.eq_up_to_ordering(&net("B + R <-> B + R_ub^a; R_ub^a -> R")));
    // the spectator partner of the interchangeable pair vanishes
    assert_eq!(step1.vanished_species().len(), 1);

    assert!(detect_intermediates(&stage1).is_none());
    let catalysts = detect_catalysts(&stage1)
        .unwrap()
        .expect("catalyst detected");
    assert_eq!(names_of(&stage1, &catalysts.0), ["B".to_string()].into());
    let (stage2, _) = remove_catalysts(&stage1, &catalysts.0).unwrap();
    assert!(stage2.eq_up_to_ordering(&net("R <-> R_ub^a")));

    // terminal: nothing else comes off
    assert!(detect_intermediates(&stage2).is_none());
    assert!(detect_catalysts(&stage2).unwrap().is_none());

    let (final_net, trace) = primitive_reduction(&g).unwrap();
    assert!(final_net.eq_up_to_ordering(&net("R <-> R_ub^a")));
    assert_eq!(trace.steps.len(), 2);
    assert_eq!(trace.steps[0].kind, StepKind::Intermediates);
    assert_eq!(trace.steps[1].kind, StepKind::Catalysts);
}

#[test]
fn ubiquitination_misplaced_catalyst() {
    // B preserves itself only after the complexes are collapsed
    let g = ubiquitination();
    let b = ids(&g, &["B"]);
    assert!(!validate_catalysts(&g, &b).unwrap().is_ok());
}

#[test]
fn wnt_chain() {
    let g = wnt();
    let detected = detect_intermediates(&g).expect("stage 1");
    assert_eq!(
        names_of(&g, &detected.0),
        ["C_YX", "C_YP", "C_YD_n", "C_YP_n", "C_YX_n", "C_YD", "C_XT", "D_i"]
            .map(String::from)
            .into()
    );
    let (stage1, step1) = remove_intermediates(&g, &detected.0).unwrap();
    let expected1 = net(
        "Y_a + X -> Y_a; Y_i + P -> Y_a + P; Y_an + D_an -> Y_in + D_an; \
         0 <-> X; X <-> X_n; X_n -> 0; D_a <-> D_an; \
         Y_in + P_n -> Y_an + P_n; Y_an + X_n -> Y_an; Y_a + D_a -> Y_i + D_a; Y_i <-> Y_in",
    );
    assert!(stage1.eq_up_to_ordering(&expected1));
    // the scaffold-bound partner T disappears with its complex
    assert_eq!(
        names_of(&g, &step1.vanished_species().iter().copied().collect()),
        ["T".to_string()].into()
    );

    assert!(detect_intermediates(&stage1).is_none());
    let cats = detect_catalysts(&stage1).unwrap().expect("stage 2");
    assert_eq!(
        names_of(&stage1, &cats.0),
        ["D_a", "D_an", "P", "P_n"].map(String::from).into()
    );
    let (stage2, _) = remove_catalysts(&stage1, &cats.0).unwrap();
    let expected2 = net(
        "Y_a + X -> Y_a; Y_i -> Y_a; Y_an -> Y_in; 0 <-> X; X <-> X_n; X_n -> 0; \
         Y_in -> Y_an; Y_an + X_n -> Y_an; Y_a -> Y_i; Y_i <-> Y_in",
    );
    assert!(stage2.eq_up_to_ordering(&expected2));

    let inter2 = detect_intermediates(&stage2).expect("stage 3");
    assert_eq!(
        names_of(&stage2, &inter2.0),
        ["Y_i", "Y_in"].map(String::from).into()
    );
    let (stage3, _) = remove_intermediates(&stage2, &inter2.0).unwrap();
    let expected3 =
        net("Y_a + X -> Y_a; Y_an + X_n -> Y_an; Y_a <-> Y_an; 0 <-> X; X <-> X_n; X_n -> 0");
    assert!(stage3.eq_up_to_ordering(&expected3));

    assert!(detect_intermediates(&stage3).is_none());
    let cats2 = detect_catalysts(&stage3).unwrap().expect("stage 4");
    assert_eq!(
        names_of(&stage3, &cats2.0),
        ["Y_a", "Y_an"].map(String::from).into()
    );
    let (stage4, _) = remove_catalysts(&stage3, &cats2.0).unwrap();
    let expected4 = net("0 <-> X; X <-> X_n; X_n -> 0");
    assert!(stage4.eq_up_to_ordering(&expected4));
    assert_eq!(stage4.n_reactions(), 5);

    assert!(detect_intermediates(&stage4).is_none());
    assert!(detect_catalysts(&stage4).unwrap().is_none());

    let (final_net, trace) = primitive_reduction(&g).unwrap();
    assert!(final_net.eq_up_to_ordering(&expected4));
    assert_eq!(trace.steps.len(), 4);
}

#[test]
fn monomer_dimer_chain() {
    let g = monomer_dimer();
    let i1 = detect_intermediates(&g).expect("stage 1");
    assert_eq!(
        names_of(&g, &i1.0),
        ["X_2P_1", "X_1P_2P_2"].map(String::from).into()
    );
    let (stage1, _) = remove_intermediates(&g, &i1.0).unwrap();
    let expected1 = net("X_1 -> X_1 + P_1; P_1 -> 0; X_2 -> X_2 + P_2; P_2 -> 0; 2P_2 <-> P_2P_2");
    assert!(stage1.eq_up_to_ordering(&expected1));

    let i2 = detect_intermediates(&stage1).expect("stage 2");
    assert_eq!(names_of(&stage1, &i2.0), ["P_2P_2".to_string()].into());
    let (stage2, _) = remove_intermediates(&stage1, &i2.0).unwrap();
    let expected2 = net("X_1 -> X_1 + P_1; P_1 -> 0; X_2 -> X_2 + P_2; P_2 -> 0");
    assert!(stage2.eq_up_to_ordering(&expected2));

    assert!(detect_intermediates(&stage2).is_none());
    let c = detect_catalysts(&stage2).unwrap().expect("stage 3");
    assert_eq!(
        names_of(&stage2, &c.0),
        ["X_1", "X_2"].map(String::from).into()
    );
    let (stage3, _) = remove_catalysts(&stage2, &c.0).unwrap();
    let expected3 = net("P_1 <-> 0; 0 <-> P_2");
    assert!(stage3.eq_up_to_ordering(&expected3));

    assert!(detect_intermediates(&stage3).is_none());
    assert!(detect_catalysts(&stage3).unwrap().is_none());

    let (final_net, trace) = primitive_reduction(&g).unwrap();
    assert!(final_net.eq_up_to_ordering(&expected3));
    assert_eq!(trace.steps.len(), 3);
}

#[test]
fn catalytic_inflow_reduces_to_reversible_pair() {
    let g = net("A + E <-> B + E; 0 -> E");
    assert!(validate_catalysts(&g, &ids(&g, &["E"])).unwrap().is_ok());
    let (reduced, trace) = primitive_reduction(&g).unwrap();
    assert!(reduced.eq_up_to_ordering(&net("A <-> B")));
    assert_eq!(trace.steps.len(), 1);
    assert_eq!(trace.steps[0].kind, StepKind::Catalysts);
}

#[test]
fn phosphorylation_reduces_to_substrate_pair() {
    let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
    let y = ids(&g, &["ES0", "FS1"]);
    let (stage1, _) = remove_intermediates(&g, &y).unwrap();
    assert!(stage1.eq_up_to_ordering(&net("E + S0 -> E + S1; F + S1 -> F + S0")));
    let (final_net, _) = primitive_reduction(&g).unwrap();
    assert!(final_net.eq_up_to_ordering(&net("S0 <-> S1")));
}

#[test]
fn single_chain_collapse() {
    let g = net("A -> Y; Y -> B; B -> A");
    let y = ids(&g, &["Y"]);
    assert!(validate_intermediates(&g, &y).unwrap().is_ok());
    let (reduced, _) = remove_intermediates(&g, &y).unwrap();
    assert!(reduced.eq_up_to_ordering(&net("A -> B; B -> A")));
}

#[test]
fn mixed_complex_violates_intermediate_shape() {
    let g = net("E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0");
    let s0 = ids(&g, &["S0"]);
    assert!(!validate_intermediates(&g, &s0).unwrap().is_ok());
}

#[test]
fn lotka_volterra_is_already_primitive() {
    let g = net("N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0");
    let (reduced, trace) = primitive_reduction(&g).unwrap();
    assert!(reduced.eq_up_to_ordering(&g));
    assert!(trace.steps.is_empty());
}

#[test]
fn reversible_pair_is_primitive() {
    let g = net("A <-> B");
    assert!(detect_intermediates(&g).is_none());
    assert!(detect_catalysts(&g).unwrap().is_none());
}

#[test]
fn empty_network_is_primitive() {
    let g = net("");
    let (reduced, trace) = primitive_reduction(&g).unwrap();
    assert!(reduced.is_empty());
    assert!(trace.steps.is_empty());
}
