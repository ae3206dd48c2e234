use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use stochastic_vc::commit::{self, AlgorithmId};
use stochastic_vc::graph::Prob;
use stochastic_vc::lowerbound::{
    build_lowerbound_instance, replicate_instance, validate_rs_graph, RsValidation,
};
use stochastic_vc::marginals::{sample_count, Provenance};
use stochastic_vc::oracle::TieBreak;

use svc_cli::config::{ExperimentConfig, MarginalMode, OracleChoice, ReportFormat};
use svc_cli::error::{CliError, Result};
use svc_cli::experiment::{profile_for, run_experiment};
use svc_cli::instance::{parse_instance, write_instance, ParsedInstance};
use svc_cli::report::write_rows;

/// Stochastic minimum vertex cover: solvers, marginal estimation,
/// experiment sweeps and adversarial lower-bound instances.
#[derive(Parser)]
#[command(name = "svc", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master seed for all randomized behavior.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Accuracy parameter of the algorithms.
    #[arg(long, global = true, default_value_t = 0.05)]
    eps: f64,

    /// Failure probability of the marginal estimator.
    #[arg(long, global = true, default_value_t = 0.1)]
    delta: f64,

    /// Cover oracle backing the algorithms.
    #[arg(long, global = true, default_value = "exact")]
    oracle: OracleChoice,

    /// Monte-Carlo trials per cell.
    #[arg(long, global = true, default_value_t = 100)]
    trials: u64,

    /// Report format.
    #[arg(long, global = true, default_value = "csv")]
    format: ReportFormat,

    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance with one seed.
    Solve {
        /// hallucinate | threshold | best-of-two | main | analysis
        #[arg(long)]
        algorithm: String,
        /// exact | estimate marginals for the profile-driven algorithms.
        #[arg(long, default_value = "exact")]
        marginals: String,
        instance: PathBuf,
    },
    /// Compute or estimate the per-vertex cover marginals.
    Marginals {
        /// exact | estimate
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Sample count override for estimate mode.
        #[arg(long)]
        samples: Option<u64>,
        instance: PathBuf,
    },
    /// Run a configured sweep and emit one report row per cell.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Append wall-clock timing to each row (nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Build, validate or evaluate planted-matching instances.
    Lowerbound {
        #[command(subcommand)]
        action: LowerboundAction,
    },
    /// Lint an instance file.
    Validate { instance: PathBuf },
}

#[derive(Subcommand)]
enum LowerboundAction {
    /// Check the induced-matching structure of an instance's rs block.
    Validate { instance: PathBuf },
    /// Build the adversarial instance from an rs file.
    Build {
        #[arg(long, default_value_t = 0.02)]
        eps2: f64,
        instance: PathBuf,
    },
    /// Evaluate the non-adaptive forced-cover accounting.
    Evaluate {
        #[arg(long, default_value_t = 0.02)]
        eps2: f64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Queried edges, allocated by the counting rule.
        #[arg(long, default_value_t = 0)]
        budget: usize,
        instance: PathBuf,
    },
}

fn parse_marginal_mode(s: &str) -> Result<MarginalMode> {
    match s {
        "exact" => Ok(MarginalMode::Exact),
        "estimate" => Ok(MarginalMode::Estimate),
        other => Err(CliError::Config(format!("unknown marginal mode '{other}'"))),
    }
}

fn warn_wide_eps(eps: f64) {
    if eps >= 0.1 {
        eprintln!("warning: eps = {eps} is outside the analyzed range (0, 0.1)");
    }
}

fn eps2_prob(eps2: f64) -> Prob {
    // Recognize round hundredths so the accounting stays exact.
    let scaled = eps2 * 100.0;
    if (scaled - scaled.round()).abs() < 1e-12 && scaled >= 1.0 {
        Prob::ratio(scaled.round() as u64, 100)
    } else {
        Prob::new(eps2)
    }
}

fn emit(global: &GlobalArgs, text: String) -> Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let global = &cli.global;
    match &cli.command {
        Command::Solve {
            algorithm,
            marginals,
            instance,
        } => {
            warn_wide_eps(global.eps);
            let algorithm: AlgorithmId = algorithm.parse().map_err(CliError::Core)?;
            let parsed = parse_instance(instance)?;
            let model = parsed.to_model()?;
            let oracle = global.oracle.build(TieBreak::Canonical);
            let profile = if matches!(algorithm, AlgorithmId::Hallucinate) {
                None
            } else {
                Some(profile_for(
                    &model,
                    &oracle,
                    parse_marginal_mode(marginals)?,
                    global.eps,
                    global.delta,
                    global.seed ^ 0x6d61_7267,
                    None,
                )?)
            };
            let run = match algorithm {
                AlgorithmId::Hallucinate => commit::run_hallucinate(&model, &oracle, global.seed)?,
                AlgorithmId::Threshold => commit::run_threshold(
                    &model,
                    profile.as_ref().unwrap(),
                    global.eps,
                    &oracle,
                    global.seed,
                )?,
                AlgorithmId::BestOfTwo => commit::run_best_of_two(
                    &model,
                    profile.as_ref().unwrap(),
                    global.eps,
                    &oracle,
                    global.seed,
                )?,
                AlgorithmId::Main => commit::run_main(
                    &model,
                    profile.as_ref().unwrap(),
                    global.eps,
                    &oracle,
                    global.seed,
                )?,
                AlgorithmId::Analysis => commit::run_analysis(
                    &model,
                    profile.as_ref().unwrap(),
                    global.eps,
                    &oracle,
                    global.seed,
                )?,
                AlgorithmId::CommitQuery => {
                    return Err(CliError::Config(
                        "commit-query is a building block, not a runnable algorithm".into(),
                    ))
                }
            };
            let mut text = String::new();
            text.push_str(&format!("instance: {}\n", parsed.id));
            text.push_str(&format!("algorithm: {}\n", run.algorithm.name()));
            if let Some(tau) = run.tau {
                text.push_str(&format!("tau: {tau}\n"));
            }
            let listed: Vec<String> = run.cover.iter().map(|v| v.to_string()).collect();
            text.push_str(&format!("cover: {}\n", listed.join(" ")));
            text.push_str(&format!("size: {}\n", run.cover_size()));
            text.push_str(&format!("queried: {}\n", run.queried_edges));
            emit(global, text)
        }
        Command::Marginals {
            mode,
            samples,
            instance,
        } => {
            let parsed = parse_instance(instance)?;
            let model = parsed.to_model()?;
            let oracle = global.oracle.build(TieBreak::Canonical);
            let mode = parse_marginal_mode(mode)?;
            let profile = profile_for(
                &model,
                &oracle,
                mode,
                global.eps,
                global.delta,
                global.seed,
                *samples,
            )?;
            let mut text = String::new();
            text.push_str(&format!("instance: {}\n", parsed.id));
            match profile.provenance {
                Provenance::Exact => text.push_str("provenance: exact\n"),
                Provenance::Estimated { samples, .. } => {
                    text.push_str("provenance: estimated\n");
                    text.push_str(&format!("samples: {samples}\n"));
                }
            }
            if matches!(mode, MarginalMode::Estimate) && samples.is_none() {
                let t = sample_count(model.vertex_count(), global.eps, global.delta)?;
                debug_assert!(matches!(
                    profile.provenance,
                    Provenance::Estimated { samples, .. } if samples == t
                ));
            }
            text.push_str(&format!("opt: {}\n", profile.opt));
            for (v, c) in profile.c_v.iter().enumerate() {
                text.push_str(&format!("c_v {v} {c}\n"));
            }
            for (i, c) in profile.c_e.iter().enumerate() {
                let (u, v) = model.base().edge(i);
                text.push_str(&format!("c_e {u} {v} {c}\n"));
            }
            emit(global, text)
        }
        Command::Experiment { config, timing } => {
            let mut config = ExperimentConfig::load(config)?;
            if let Some(out) = &global.out {
                config.out = Some(out.to_string_lossy().into_owned());
            }
            warn_wide_eps(config.eps);
            let rows = run_experiment(&config, *timing)?;
            let mut buf = Vec::new();
            write_rows(&rows, config.format, *timing, &mut buf)?;
            match &config.out {
                Some(path) => std::fs::write(path, buf)?,
                None => print!("{}", String::from_utf8_lossy(&buf)),
            }
            Ok(())
        }
        Command::Lowerbound { action } => match action {
            LowerboundAction::Validate { instance } => {
                let parsed = parse_instance(instance)?;
                let rs = parsed.to_rs_graph()?;
                match validate_rs_graph(&rs) {
                    RsValidation::Ok { r, t } => {
                        emit(global, format!("ok: side={} r={r} t={t}\n", rs.side()))
                    }
                    RsValidation::Violation(v) => Err(CliError::Validation(format!(
                        "{:?}: {} (witness edges {:?})",
                        v.kind, v.detail, v.witness
                    ))),
                }
            }
            LowerboundAction::Build { eps2, instance } => {
                let parsed = parse_instance(instance)?;
                let rs = parsed.to_rs_graph()?;
                let inst = build_lowerbound_instance(&rs, eps2_prob(*eps2))?;
                let built = ParsedInstance::from_lowerbound(format!("{}-lb", parsed.id), &inst);
                match &global.out {
                    Some(path) => {
                        write_instance(&built, path)?;
                        Ok(())
                    }
                    None => {
                        print!("{}", svc_cli::instance::instance_to_string(&built));
                        Ok(())
                    }
                }
            }
            LowerboundAction::Evaluate {
                eps2,
                copies,
                budget,
                instance,
            } => {
                let parsed = parse_instance(instance)?;
                let rs = parsed.to_rs_graph()?;
                let inst = build_lowerbound_instance(&rs, eps2_prob(*eps2))?;
                let family = replicate_instance(&inst, *copies)?;
                let q = family.counting_rule_budget(*budget);
                let forced = family.nonadaptive_forced_cover(&q);
                let opt = family.expected_opt();
                let ratio = if opt > 0.0 { forced / opt } else { 1.0 };
                let mut text = String::new();
                text.push_str(&format!(
                    "side: {} r: {} t: {}\n",
                    inst.side(),
                    inst.matching_size(),
                    inst.matchings().len()
                ));
                text.push_str(&format!("copies: {copies}\n"));
                text.push_str(&format!("edges: {}\n", family.edge_count()));
                text.push_str(&format!("budget: {budget}\n"));
                text.push_str(&format!("forced: {forced}\n"));
                text.push_str(&format!("expected_opt: {opt}\n"));
                text.push_str(&format!("ratio: {ratio}\n"));
                emit(global, text)
            }
        },
        Command::Validate { instance } => {
            let parsed = parse_instance(instance)?;
            if parsed.rs.is_some() {
                let rs = parsed.to_rs_graph()?;
                if let RsValidation::Violation(v) = validate_rs_graph(&rs) {
                    return Err(CliError::Validation(format!("{:?}: {}", v.kind, v.detail)));
                }
            }
            emit(
                global,
                format!(
                    "ok: {} (n={}, m={}{}{})\n",
                    parsed.id,
                    parsed.base.vertex_count(),
                    parsed.base.edge_count(),
                    if parsed.correlated.is_some() {
                        ", correlated"
                    } else {
                        ""
                    },
                    if parsed.rs.is_some() { ", rs" } else { "" },
                ),
            )
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
