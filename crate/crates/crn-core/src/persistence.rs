//! The verdict engine: maps structural certificates (conservation laws,
//! T-semiflows, siphon classifications, primitive reductions) onto
//! persistence conclusions, never extrapolating beyond the implications the
//! certificates actually support.

use crate::error::Result;
use crate::feasibility::{positive_kernel, positive_left_kernel, Witness};
use crate::network::ReactionNetwork;
use crate::reduction::{primitive_reduction, ReductionTrace};
use crate::siphon::{
    classify_siphon, has_drainable_siphon, has_self_replicable_siphon, minimal_siphons_with_budget,
    siphon_psemiflow_property_with_budget, PsfVerdict, SiphonClassification, DEFAULT_NODE_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Persistent,
    BoundedPersistent,
    NoBoundarySteadyStatesOffBoundaryClasses,
    NotPersistent,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Persistent => "persistent",
            Verdict::BoundedPersistent => "bounded-persistent",
            Verdict::NoBoundarySteadyStatesOffBoundaryClasses => {
                "no-boundary-steady-states-off-boundary-classes"
            }
            Verdict::NotPersistent => "not-persistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryVerdict {
    Precluded,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct VerdictEntry {
    pub verdict: Verdict,
    pub rule: String,
    pub premises: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct PropertyWithWitness {
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub species: Vec<String>,
    pub n_reactions: usize,
    pub conservative: PropertyWithWitness,
    pub consistent: PropertyWithWitness,
    pub siphon_psemiflow: PsfVerdict,
    pub drainable_free: bool,
    pub self_replicable_free: bool,
    pub minimal_siphon_classifications: Vec<SiphonClassification>,
    pub reduction: ReductionTrace,
    pub reduction_monomolecular: bool,
    pub reduction_strongly_connected: bool,
    pub verdicts: Vec<VerdictEntry>,
    pub boundary: BoundaryVerdict,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub assume_dissipative: bool,
    pub node_budget: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            assume_dissipative: false,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

pub fn analyze(net: &ReactionNetwork) -> Result<AnalysisReport> {
    analyze_with(net, AnalyzeOptions::default())
}

pub fn analyze_with(net: &ReactionNetwork, opts: AnalyzeOptions) -> Result<AnalysisReport> {
    let n = net.stoichiometric_matrix();
    let conservative_w = positive_left_kernel(&n);
    let consistent_w = positive_kernel(&n);
    let conservative = conservative_w.is_some();
    let consistent = consistent_w.is_some();
    let psf = siphon_psemiflow_property_with_budget(net, opts.node_budget)?;
    let drainable_free = !has_drainable_siphon(net, opts.node_budget)?;
    let self_replicable_free = !has_self_replicable_siphon(net, opts.node_budget)?;

    let mut classifications = Vec::new();
    for siphon in minimal_siphons_with_budget(net, opts.node_budget)? {
        classifications.push(classify_siphon(net, siphon.members())?);
    }

    let (reduced, trace) = primitive_reduction(net)?;
    let reduction_monomolecular = reduced.is_monomolecular();
    let reduction_strongly_connected = reduced.components_strongly_connected();

    let mut verdicts: Vec<VerdictEntry> = Vec::new();
    fn emit_into(
        verdicts: &mut Vec<VerdictEntry>,
        verdict: Verdict,
        rule: &str,
        premises: Vec<String>,
    ) {
        if !verdicts.iter().any(|v| v.verdict == verdict) {
            verdicts.push(VerdictEntry {
                verdict,
                rule: rule.to_string(),
                premises,
            });
        }
    }
    macro_rules! emit {
        ($v:expr, $rule:expr, $premises:expr $(,)?) => {
            emit_into(&mut verdicts, $v, $rule, $premises)
        };
    }

    if drainable_free {
        emit!(
            Verdict::BoundedPersistent,
            "no-drainable-siphons",
            vec!["every minimal siphon admits no draining combination".into()],
        );
    }
    if psf.holds {
        emit!(
            Verdict::NoBoundarySteadyStatesOffBoundaryClasses,
            "siphon-psemiflow-property",
            vec!["every minimal siphon supports a conservation vector".into()],
        );
    }
    if conservative && drainable_free {
        emit!(
            Verdict::Persistent,
            "conservative-and-bounded-persistent",
            vec![
                "strictly positive conservation law".into(),
                "no drainable siphons".into(),
            ],
        );
    }
    if reduction_monomolecular && reduction_strongly_connected {
        emit!(
            Verdict::BoundedPersistent,
            "reduction-strongly-connected",
            vec!["primitive reduction is monomolecular with strongly connected components".into()],
        );
        emit!(
            Verdict::NoBoundarySteadyStatesOffBoundaryClasses,
            "reduction-strongly-connected",
            vec!["primitive reduction is monomolecular with strongly connected components".into()],
        );
        if conservative {
            emit!(
                Verdict::Persistent,
                "reduction-strongly-connected-conservative",
                vec![
                    "primitive reduction is monomolecular with strongly connected components"
                        .into(),
                    "strictly positive conservation law".into(),
                ],
            );
        }
    }
    if conservative && !consistent {
        emit!(
            Verdict::NotPersistent,
            "conservative-not-consistent",
            vec![
                "strictly positive conservation law".into(),
                "no strictly positive T-semiflow".into(),
            ],
        );
    }
    if conservative && net.is_monomolecular() {
        // the six equivalent properties of conservative monomolecular networks
        if consistent {
            emit!(
                Verdict::Persistent,
                "monomolecular-equivalence",
                vec!["conservative monomolecular network with a positive T-semiflow".into()],
            );
        } else {
            emit!(
                Verdict::NotPersistent,
                "monomolecular-equivalence",
                vec!["conservative monomolecular network without a positive T-semiflow".into()],
            );
        }
    }
    let mut assumptions = Vec::new();
    if opts.assume_dissipative {
        assumptions.push("dissipative".to_string());
        if drainable_free {
            emit!(
                Verdict::Persistent,
                "dissipative-and-bounded-persistent",
                vec![
                    "declared dissipative (assumption, not verified)".into(),
                    "no drainable siphons".into(),
                ],
            );
        }
    }
    if verdicts.is_empty() {
        emit!(Verdict::Inconclusive, "no-rule-applies", Vec::new());
    }
    // persistence entails bounded persistence; keep the emitted set closed
    if verdicts.iter().any(|v| v.verdict == Verdict::Persistent)
        && !verdicts
            .iter()
            .any(|v| v.verdict == Verdict::BoundedPersistent)
    {
        verdicts.push(VerdictEntry {
            verdict: Verdict::BoundedPersistent,
            rule: "persistent-implies-bounded-persistent".into(),
            premises: vec!["persistence verdict above".into()],
        });
    }
    assert!(
        !(verdicts.iter().any(|v| v.verdict == Verdict::Persistent)
            && verdicts.iter().any(|v| v.verdict == Verdict::NotPersistent)),
        "contradictory verdicts"
    );
    verdicts.sort_by_key(|v| v.verdict);

    let boundary = if psf.holds {
        BoundaryVerdict::Precluded
    } else {
        BoundaryVerdict::Unknown
    };

    Ok(AnalysisReport {
        species: net.species_names().to_vec(),
        n_reactions: net.n_reactions(),
        conservative: PropertyWithWitness {
            holds: conservative,
            witness: conservative_w,
        },
        consistent: PropertyWithWitness {
            holds: consistent,
            witness: consistent_w,
        },
        siphon_psemiflow: psf,
        drainable_free,
        self_replicable_free,
        minimal_siphon_classifications: classifications,
        reduction: trace,
        reduction_monomolecular,
        reduction_strongly_connected,
        verdicts,
        boundary,
        assumptions,
    })
}

/// Boundary steady states are precluded (off fully-boundary compatibility
/// classes) exactly when the siphon/P-semiflow property holds; the absence of
/// drainable siphons alone does not preclude them.
pub fn boundary_steady_state_verdict(net: &ReactionNetwork) -> Result<BoundaryVerdict> {
    Ok(
        if siphon_psemiflow_property_with_budget(net, DEFAULT_NODE_BUDGET)?.holds {
            BoundaryVerdict::Precluded
        } else {
            BoundaryVerdict::Unknown
        },
    )
}
