//! Structural analysis of chemical reaction networks.
//!
//! The crate decides persistence-related structural properties — siphons,
//! conservation laws and T-semiflows, drainable and self-replicable sets —
//! over exact rational arithmetic, simplifies networks by removing
//! intermediate species and catalysts down to a unique primitive form, and
//! lifts every certificate produced on the reduced network back to the
//! original. A small mass-action integrator provides empirical sanity
//! checks; it never influences verdicts.

pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod network;
pub mod oracle;
pub mod persistence;
pub mod ptm;
pub mod random;
pub mod rational;
pub mod reduction;
pub mod siphon;

pub use error::{Error, Result, Violations};
pub use feasibility::{
    positive_kernel, positive_left_kernel, semiflow_supported_in, signed_combination, Feasibility,
    FeasibilityProblem, IndexKind, RationalVector, SignKind, Witness, WitnessKind,
};
pub use network::{build_network, Complex, RawReaction, Reaction, ReactionNetwork, SpeciesId};
pub use persistence::{
    analyze, analyze_with, boundary_steady_state_verdict, AnalysisReport, AnalyzeOptions,
    BoundaryVerdict, Verdict, VerdictEntry,
};
pub use ptm::{CascadeSpec, PTMPartition};
pub use rational::{frac, parse_rational, rat, Rational, RationalMatrix};
pub use reduction::{
    detect_catalysts, detect_intermediates, lift_conservation_law, lift_siphon, lift_t_semiflow,
    primitive_reduction, primitive_reduction_seeded, project_siphon, remove_catalysts,
    remove_intermediates, validate_catalysts, validate_intermediates, CatalystSet,
    ConservationInput, IntermediateSet, LiftedConservationLaw, ReductionStep, ReductionTrace,
    StepKind, Validation,
};
pub use siphon::{
    classify_siphon, is_siphon, minimal_siphons, minimal_siphons_with_budget,
    no_drainable_or_self_replicable, pathway_from_sequence, siphon_psemiflow_property,
    GReactionPathway, PsfVerdict, Siphon, SiphonClassification, DEFAULT_NODE_BUDGET,
};
