//! JSON reports: schema-stable serialization of an analysis, with enough
//! data to replay every witness after reloading.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crn_core::feasibility::{IndexKind, RationalVector, Witness, WitnessKind};
use crn_core::persistence::{AnalysisReport, BoundaryVerdict};
use crn_core::rational::parse_rational;
use crn_core::{ReactionNetwork, StepKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub network: NetworkDto,
    pub properties: PropertiesDto,
    pub witnesses: Vec<WitnessDto>,
    pub siphons: Vec<SiphonDto>,
    pub reduction_trace: ReductionDto,
    pub verdicts: Vec<VerdictDto>,
    pub boundary_steady_states: String,
    pub assumptions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkDto {
    pub species: Vec<String>,
    pub reactions: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertiesDto {
    pub conservative: bool,
    pub consistent: bool,
    pub siphon_psemiflow: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_siphon: Option<Vec<String>>,
    pub drainable_free: bool,
    pub self_replicable_free: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessDto {
    pub claim: String,
    pub over: String,
    pub entries: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub siphon: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiphonDto {
    pub members: Vec<String>,
    pub minimal: bool,
    pub critical: bool,
    pub drainable: bool,
    pub self_replicable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionDto {
    pub steps: Vec<StepDto>,
    pub final_network: Vec<String>,
    pub monomolecular: bool,
    pub strongly_connected: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDto {
    pub kind: String,
    pub removed: Vec<String>,
    pub after: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictDto {
    pub verdict: String,
    pub rule: String,
    pub premises: Vec<String>,
}

fn network_lines(net: &ReactionNetwork) -> Vec<String> {
    (0..net.n_reactions())
        .map(|j| {
            format!(
                "{} -> {}",
                net.reactant(j).display(net.species_names()),
                net.product(j).display(net.species_names())
            )
        })
        .collect()
}

fn witness_dto(claim: &str, w: &Witness, siphon: Option<Vec<String>>) -> WitnessDto {
    WitnessDto {
        claim: claim.to_string(),
        over: match w.vector.kind {
            IndexKind::Species => "species".into(),
            IndexKind::Reactions => "reactions".into(),
        },
        entries: w.vector.entries.iter().map(|r| r.to_string()).collect(),
        siphon,
    }
}

pub fn build_report(
    net: &ReactionNetwork,
    analysis: &AnalysisReport,
    timestamp: Option<String>,
) -> Report {
    let mut witnesses = Vec::new();
    if let Some(w) = &analysis.conservative.witness {
        witnesses.push(witness_dto("conservation-law", w, None));
    }
    if let Some(w) = &analysis.consistent.witness {
        witnesses.push(witness_dto("t-semiflow", w, None));
    }
    let mut siphons = Vec::new();
    for c in &analysis.minimal_siphon_classifications {
        let names = c.siphon.names(net);
        if let Some(w) = &c.semiflow {
            witnesses.push(witness_dto("supported-semiflow", w, Some(names.clone())));
        }
        if let Some(w) = &c.drainable {
            witnesses.push(witness_dto("drain", w, Some(names.clone())));
        }
        if let Some(w) = &c.self_replicable {
            witnesses.push(witness_dto("replicate", w, Some(names.clone())));
        }
        siphons.push(SiphonDto {
            members: names,
            minimal: c.minimal,
            critical: c.critical,
            drainable: c.drainable.is_some(),
            self_replicable: c.self_replicable.is_some(),
        });
    }
    Report {
        network: NetworkDto {
            species: net.species_names().to_vec(),
            reactions: network_lines(net),
        },
        properties: PropertiesDto {
            conservative: analysis.conservative.holds,
            consistent: analysis.consistent.holds,
            siphon_psemiflow: analysis.siphon_psemiflow.holds,
            violating_siphon: analysis
                .siphon_psemiflow
                .violating_siphon
                .as_ref()
                .map(|s| s.names(net)),
            drainable_free: analysis.drainable_free,
            self_replicable_free: analysis.self_replicable_free,
        },
        witnesses,
        siphons,
        reduction_trace: ReductionDto {
            steps: analysis
                .reduction
                .steps
                .iter()
                .map(|s| StepDto {
                    kind: match s.kind {
                        StepKind::Intermediates => "intermediates".into(),
                        StepKind::Catalysts => "catalysts".into(),
                    },
                    removed: s.removed_names(),
                    after: network_lines(&s.after),
                })
                .collect(),
            final_network: network_lines(analysis.reduction.final_network()),
            monomolecular: analysis.reduction_monomolecular,
            strongly_connected: analysis.reduction_strongly_connected,
        },
        verdicts: analysis
            .verdicts
            .iter()
            .map(|v| VerdictDto {
                verdict: v.verdict.label().to_string(),
                rule: v.rule.clone(),
                premises: v.premises.clone(),
            })
            .collect(),
        boundary_steady_states: match analysis.boundary {
            BoundaryVerdict::Precluded => "precluded".into(),
            BoundaryVerdict::Unknown => "unknown".into(),
        },
        assumptions: analysis.assumptions.clone(),
        generated_at: timestamp,
    }
}

/// Re-verifies every witness in a loaded report against the network it
/// describes. Exact arithmetic: any nonzero residual is a failure.
pub fn replay_witnesses(report: &Report, net: &ReactionNetwork) -> bool {
    let n = net.stoichiometric_matrix();
    report.witnesses.iter().all(|w| {
        let entries: Option<Vec<_>> = w.entries.iter().map(|s| parse_rational(s)).collect();
        let Some(entries) = entries else { return false };
        let kind = match w.claim.as_str() {
            "conservation-law" => WitnessKind::PSemiflow,
            "t-semiflow" => WitnessKind::TSemiflow,
            "supported-semiflow" => WitnessKind::SupportedSemiflow,
            "drain" => WitnessKind::DrainWitness,
            "replicate" => WitnessKind::ReplicateWitness,
            _ => return false,
        };
        let vector = RationalVector {
            kind: if w.over == "species" {
                IndexKind::Species
            } else {
                IndexKind::Reactions
            },
            entries,
        };
        let sigma: Option<BTreeSet<usize>> = w.siphon.as_ref().map(|names| {
            names
                .iter()
                .filter_map(|name| net.species_index(name))
                .collect()
        });
        Witness { kind, vector }.replay(&n, sigma.as_ref())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crn_core::analyze;

    #[test]
    fn report_witnesses_replay_after_round_trip() {
        let net: ReactionNetwork = "E + S0 <-> ES0; ES0 -> E + S1; F + S1 <-> FS1; FS1 -> F + S0"
            .parse()
            .unwrap();
        let analysis = analyze(&net).unwrap();
        let report = build_report(&net, &analysis, None);
        let json = serde_json::to_string_pretty(&report).unwrap();
        let loaded: Report = serde_json::from_str(&json).unwrap();
        assert!(replay_witnesses(&loaded, &net));
    }

    #[test]
    fn report_json_is_deterministic() {
        let net: ReactionNetwork = "N -> 2N; N + P -> P; N + P -> N + 2P; P -> 0"
            .parse()
            .unwrap();
        let a = serde_json::to_string(&build_report(&net, &analyze(&net).unwrap(), None)).unwrap();
        let b = serde_json::to_string(&build_report(&net, &analyze(&net).unwrap(), None)).unwrap();
        assert_eq!(a, b);
    }
}
