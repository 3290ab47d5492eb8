use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crn_cli::parse::{parse, NetworkDocument};
use crn_cli::report::build_report;
use crn_core::dynamics::{integrate, MassActionSystem, StepControl};
use crn_core::persistence::{analyze_with, AnalyzeOptions};
use crn_core::ptm::{cascade_persistence, validate_cascade};
use crn_core::reduction::Validation;
use crn_core::siphon::{
    classify_siphon, minimal_siphons_with_budget, siphon_psemiflow_property_with_budget,
};
use crn_core::{
    positive_kernel, positive_left_kernel, Error as CoreError, ReactionNetwork, DEFAULT_NODE_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "crn",
    about = "Structural persistence analysis of reaction networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: properties, siphons, reduction and verdicts
    Analyze {
        /// A .crn file, or a directory analyzed file by file
        path: PathBuf,
        #[arg(long)]
        json: bool,
        /// Record dissipativity as an assumption, unlocking the
        /// persistence rule for bounded-persistent networks
        #[arg(long)]
        assume_dissipative: bool,
    },
    /// Reduce to the primitive network
    Reduce {
        file: PathBuf,
        /// Print each removal step
        #[arg(long)]
        steps: bool,
    },
    /// List minimal siphons
    Siphons {
        file: PathBuf,
        /// Classify each siphon (critical, drainable, self-replicable)
        #[arg(long)]
        classify: bool,
    },
    /// Check one property; exit 0 when it holds, 1 when it fails
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
    },
    /// Validate the annotated partition or cascade and report persistence
    Ptm { file: PathBuf },
    /// Integrate mass-action dynamics and summarize the trajectory
    Simulate {
        file: PathBuf,
        #[arg(long)]
        horizon: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Conservative,
    Consistent,
    SiphonPsemiflow,
    /// Absence of drainable siphons
    Drainable,
}

fn node_budget() -> u64 {
    std::env::var("CRN_NODE_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load(file: &Path) -> Result<(NetworkDocument, ReactionNetwork), String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let doc = parse(&text).map_err(|e| e.to_string())?;
    let net = doc.network().map_err(|e| e.to_string())?;
    Ok((doc, net))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            path,
            json,
            assume_dissipative,
        } => cmd_analyze(&path, json, assume_dissipative),
        Command::Reduce { file, steps } => cmd_reduce(&file, steps),
        Command::Siphons { file, classify } => cmd_siphons(&file, classify),
        Command::Check { file, property } => cmd_check(&file, property),
        Command::Ptm { file } => cmd_ptm(&file),
        Command::Simulate { file, horizon } => cmd_simulate(&file, horizon),
    }
}

fn report_core_error(e: &CoreError) -> ExitCode {
    if let CoreError::ExplosionCap(limit) = e {
        eprintln!(
            "error: siphon enumeration exceeded the node budget ({limit}); \
             raise CRN_NODE_BUDGET to continue"
        );
        return ExitCode::from(2);
    }
    fail(e)
}

fn cmd_analyze(path: &Path, json: bool, assume_dissipative: bool) -> ExitCode {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut entries: Vec<PathBuf> = match std::fs::read_dir(path) {
            Ok(rd) => rd
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "crn"))
                .collect(),
            Err(e) => return fail(e),
        };
        entries.sort();
        entries
    } else {
        vec![path.to_path_buf()]
    };
    let mut reports = Vec::new();
    for file in &files {
        let (doc, net) = match load(file) {
            Ok(x) => x,
            Err(e) => return fail(e),
        };
        let opts = AnalyzeOptions {
            assume_dissipative: assume_dissipative || doc.assume_dissipative,
            node_budget: node_budget(),
        };
        let analysis = match analyze_with(&net, opts) {
            Ok(a) => a,
            Err(e) => return report_core_error(&e),
        };
        let timestamp = Some(chrono::Utc::now().to_rfc3339());
        reports.push((file.clone(), net, analysis, timestamp));
    }
    if json {
        let rendered: Vec<_> = reports
            .iter()
            .map(|(_, net, analysis, ts)| build_report(net, analysis, ts.clone()))
            .collect();
        let out = if rendered.len() == 1 {
            serde_json::to_string_pretty(&rendered[0]).unwrap()
        } else {
            serde_json::to_string_pretty(&rendered).unwrap()
        };
        println!("{out}");
    } else {
        for (file, net, analysis, _) in &reports {
            if reports.len() > 1 {
                println!("== {}", file.display());
            }
            print_summary(net, analysis);
        }
    }
    ExitCode::SUCCESS
}

fn print_summary(net: &ReactionNetwork, analysis: &crn_core::AnalysisReport) {
    println!(
        "network: {} species, {} reactions",
        net.n_species(),
        net.n_reactions()
    );
    println!("conservative:         {}", analysis.conservative.holds);
    println!("consistent:           {}", analysis.consistent.holds);
    println!("siphon/P-semiflow:    {}", analysis.siphon_psemiflow.holds);
    println!("drainable-free:       {}", analysis.drainable_free);
    println!("self-replicable-free: {}", analysis.self_replicable_free);
    let reduced = analysis.reduction.final_network();
    println!(
        "primitive reduction:  {} species, {} reactions ({} steps){}",
        reduced.n_species(),
        reduced.n_reactions(),
        analysis.reduction.steps.len(),
        if analysis.reduction_monomolecular && analysis.reduction_strongly_connected {
            ", monomolecular and strongly connected"
        } else {
            ""
        }
    );
    println!(
        "boundary steady states: {}",
        match analysis.boundary {
            crn_core::BoundaryVerdict::Precluded => "precluded off boundary classes",
            crn_core::BoundaryVerdict::Unknown => "unknown",
        }
    );
    for v in &analysis.verdicts {
        println!("verdict: {} [{}]", v.verdict.label(), v.rule);
    }
    for a in &analysis.assumptions {
        println!("assumption: {a}");
    }
}

fn cmd_reduce(file: &Path, steps: bool) -> ExitCode {
    let (_, net) = match load(file) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let (reduced, trace) = match crn_core::primitive_reduction(&net) {
        Ok(x) => x,
        Err(e) => return report_core_error(&e),
    };
    if steps {
        for (k, step) in trace.steps.iter().enumerate() {
            println!(
                "step {}: remove {} {{{}}}",
                k + 1,
                match step.kind {
                    crn_core::StepKind::Intermediates => "intermediates",
                    crn_core::StepKind::Catalysts => "catalysts",
                },
                step.removed_names().join(", ")
            );
            let text = crn_cli::parse::print_network(&step.after);
            if text.is_empty() {
                println!("  (empty network)");
            } else {
                for line in text.lines() {
                    println!("  {line}");
                }
            }
        }
    }
    println!("primitive reduction after {} steps:", trace.steps.len());
    let text = crn_cli::parse::print_network(&reduced);
    if text.is_empty() {
        println!("(empty network)");
    } else {
        print!("{text}");
    }
    ExitCode::SUCCESS
}

fn cmd_siphons(file: &Path, classify: bool) -> ExitCode {
    let (_, net) = match load(file) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let siphons = match minimal_siphons_with_budget(&net, node_budget()) {
        Ok(s) => s,
        Err(e) => return report_core_error(&e),
    };
    if siphons.is_empty() {
        println!("no siphons");
        return ExitCode::SUCCESS;
    }
    for siphon in &siphons {
        let names = siphon.names(&net).join(", ");
        if classify {
            match classify_siphon(&net, siphon.members()) {
                Ok(c) => println!(
                    "{{{names}}} critical={} drainable={} self-replicable={}",
                    c.critical,
                    c.drainable.is_some(),
                    c.self_replicable.is_some()
                ),
                Err(e) => return report_core_error(&e),
            }
        } else {
            println!("{{{names}}}");
        }
    }
    ExitCode::SUCCESS
}

fn cmd_check(file: &Path, property: Property) -> ExitCode {
    let (_, net) = match load(file) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let n = net.stoichiometric_matrix();
    let budget = node_budget();
    let outcome: Result<(bool, String), CoreError> = match property {
        Property::Conservative => Ok(match positive_left_kernel(&n) {
            Some(w) => (
                true,
                format!("conservation law: {}", vec_str(&w.vector.entries)),
            ),
            None => (false, "no strictly positive conservation law".into()),
        }),
        Property::Consistent => Ok(match positive_kernel(&n) {
            Some(w) => (true, format!("T-semiflow: {}", vec_str(&w.vector.entries))),
            None => (false, "no strictly positive T-semiflow".into()),
        }),
        Property::SiphonPsemiflow => {
            siphon_psemiflow_property_with_budget(&net, budget).map(|v| match v.violating_siphon {
                None => (
                    true,
                    "every minimal siphon supports a conservation vector".into(),
                ),
                Some(s) => (
                    false,
                    format!("critical siphon {{{}}}", s.names(&net).join(", ")),
                ),
            })
        }
        Property::Drainable => check_drainable(&net, budget),
    };
    match outcome {
        Ok((true, msg)) => {
            println!("holds: {msg}");
            ExitCode::SUCCESS
        }
        Ok((false, msg)) => {
            println!("fails: {msg}");
            ExitCode::from(1)
        }
        Err(e) => report_core_error(&e),
    }
}

fn check_drainable(net: &ReactionNetwork, budget: u64) -> Result<(bool, String), CoreError> {
    let n = net.stoichiometric_matrix();
    for siphon in minimal_siphons_with_budget(net, budget)? {
        if let Some(w) =
            crn_core::signed_combination(&n, siphon.members(), crn_core::SignKind::Negative)?
        {
            return Ok((
                false,
                format!(
                    "drainable siphon {{{}}} via reaction multiset {}",
                    siphon.names(net).join(", "),
                    vec_str(&w.vector.entries)
                ),
            ));
        }
    }
    Ok((true, "no drainable siphons".into()))
}

fn vec_str(entries: &[crn_core::Rational]) -> String {
    let parts: Vec<String> = entries.iter().map(|r| r.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn cmd_ptm(file: &Path) -> ExitCode {
    let (doc, net) = match load(file) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let Some(spec) = doc.cascade_spec(&net) else {
        return fail("no @ptm layer annotations in the file");
    };
    match validate_cascade(&net, &spec) {
        Ok(Validation::Ok) => {}
        Ok(Validation::Invalid(v)) => return fail(format!("invalid cascade: {v}")),
        Err(e) => return report_core_error(&e),
    }
    let verdict = match cascade_persistence(&net, &spec) {
        Ok(v) => v,
        Err(e) => return report_core_error(&e),
    };
    println!("{} layer(s) validated", spec.layers.len());
    for (k, layer) in verdict.layers.iter().enumerate() {
        println!(
            "layer {}: substrate network {} strongly connected",
            k + 1,
            if layer.strongly_connected {
                "is"
            } else {
                "is NOT"
            }
        );
    }
    println!(
        "verdict: {}",
        if verdict.persistent {
            "persistent"
        } else {
            "not persistent"
        }
    );
    ExitCode::SUCCESS
}

fn cmd_simulate(file: &Path, horizon: f64) -> ExitCode {
    if horizon <= 0.0 {
        return fail("horizon must be positive");
    }
    let (doc, net) = match load(file) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let rates = doc.rate_constants(&net);
    let initial = doc.initial_state(&net);
    let sys = match MassActionSystem::new(net.clone(), rates, initial) {
        Ok(s) => s,
        Err(e) => return report_core_error(&e),
    };
    let record = match integrate(&sys, horizon, StepControl::default()) {
        Ok(r) => r,
        Err(e) => return report_core_error(&e),
    };
    let last = record.states.last().unwrap();
    println!("integrated to t = {horizon}");
    for (s, name) in net.species_names().iter().enumerate() {
        println!(
            "{name}: final {:.6}, minimum {:.6}",
            last[s], record.min_concentration[s]
        );
    }
    println!(
        "steady-state residual at endpoint: {:.3e}",
        record.final_residual
    );
    if record.clamped {
        println!("note: tiny negative overshoots were clamped to zero");
    }
    let zero: BTreeSet<usize> = crn_core::dynamics::zero_coordinate_set(last, 0.0);
    if record.final_residual < 1e-9 && !zero.is_empty() {
        let names: Vec<&str> = zero.iter().map(|&s| net.species_name(s)).collect();
        println!("boundary steady state; zero set {{{}}}", names.join(", "));
    }
    ExitCode::SUCCESS
}
