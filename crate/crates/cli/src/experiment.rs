//! Experiment orchestration: runs each (instance, algorithm) cell and
//! produces one report row per cell.
//!
//! Exact mode replaces sampling with a full weighted sweep of the scenario
//! space. Monte-Carlo trials execute in the rayon pool with per-trial
//! derived seeds and are merged in trial order, so reports do not depend on
//! the worker count; every trial's cover is validated against the served
//! realization before it is counted.

use rayon::prelude::*;
use std::time::Instant;

use stochastic_vc::commit::{self, exact, AlgorithmId, RunResult};
use stochastic_vc::graph::is_vertex_cover;
use stochastic_vc::marginals::{
    estimate_marginals, estimate_marginals_with_samples, exact_marginals, expected_opt,
    MarginalProfile, OptMode,
};
use stochastic_vc::model::Model;
use stochastic_vc::oracle::{CoverOracle, TieBreak};
use stochastic_vc::rng;

use crate::config::{ExperimentConfig, MarginalMode, RunMode};
use crate::error::{CliError, Result};
use crate::instance::{parse_instance, ParsedInstance};
use crate::report::ReportRow;

fn tag(instance: &str, e: CliError) -> CliError {
    match e {
        CliError::Validation(msg) => CliError::Validation(format!("{instance}: {msg}")),
        CliError::Config(msg) => CliError::Config(format!("{instance}: {msg}")),
        other => other,
    }
}

/// Number of outcomes a full weighted sweep enumerates.
fn outcome_count(model: &Model) -> u64 {
    let base = model.base();
    let free = |indices: &[usize]| -> u32 {
        indices
            .iter()
            .filter(|&&i| base.prob(i).value() < 1.0)
            .count() as u32
    };
    match model {
        Model::Independent(_) => {
            let all: Vec<usize> = (0..base.edge_count()).collect();
            1u64 << free(&all)
        }
        Model::Correlated(m) => m.scenarios().len() as u64 * (1u64 << free(&m.e1_indices())),
    }
}

pub struct CellSpec<'a> {
    pub instance_id: &'a str,
    pub model: &'a Model,
    pub algorithm: AlgorithmId,
    pub oracle: &'a CoverOracle,
    pub profile: Option<&'a MarginalProfile>,
    pub eps: f64,
    pub mode: RunMode,
    pub trials: u64,
    pub seed: u64,
}

fn run_once(spec: &CellSpec, trial_seed: u64) -> Result<RunResult> {
    let need_profile = || -> Result<&MarginalProfile> {
        spec.profile.ok_or_else(|| {
            CliError::Validation(format!(
                "algorithm {} needs a marginal profile",
                spec.algorithm.name()
            ))
        })
    };
    let run = match spec.algorithm {
        AlgorithmId::Hallucinate => commit::run_hallucinate(spec.model, spec.oracle, trial_seed)?,
        AlgorithmId::Threshold => commit::run_threshold(
            spec.model,
            need_profile()?,
            spec.eps,
            spec.oracle,
            trial_seed,
        )?,
        AlgorithmId::BestOfTwo => commit::run_best_of_two(
            spec.model,
            need_profile()?,
            spec.eps,
            spec.oracle,
            trial_seed,
        )?,
        AlgorithmId::Main => commit::run_main(
            spec.model,
            need_profile()?,
            spec.eps,
            spec.oracle,
            trial_seed,
        )?,
        AlgorithmId::Analysis => commit::run_analysis(
            spec.model,
            need_profile()?,
            spec.eps,
            spec.oracle,
            trial_seed,
        )?,
        AlgorithmId::CommitQuery => {
            return Err(CliError::Validation(
                "commit-query is a building block, not a runnable algorithm".into(),
            ))
        }
    };
    let served = commit::served_realization(spec.model, trial_seed);
    if !is_vertex_cover(spec.model.base().realized_edges(&served), &run.cover) {
        return Err(CliError::Validation(format!(
            "algorithm {} emitted a non-cover at seed {trial_seed}",
            spec.algorithm.name()
        )));
    }
    Ok(run)
}

/// Runs one (instance, algorithm) cell and reports it.
pub fn run_cell(spec: &CellSpec, timing: bool) -> Result<ReportRow> {
    let started = Instant::now();
    let base = spec.model.base();
    let n = base.vertex_count();
    let m = base.edge_count();
    let p_min = base.min_probability();

    let (mean_cover, mean_queries, trials_reported, opt, opt_se) = match spec.mode {
        RunMode::Exact => {
            let eval = match spec.algorithm {
                AlgorithmId::Hallucinate => exact::hallucinate(spec.model, spec.oracle)?,
                AlgorithmId::Threshold => exact::threshold(
                    spec.model,
                    spec.oracle,
                    require(spec.profile, spec.algorithm)?,
                    spec.eps,
                )?,
                AlgorithmId::BestOfTwo => exact::best_of_two(
                    spec.model,
                    spec.oracle,
                    require(spec.profile, spec.algorithm)?,
                    spec.eps,
                )?,
                AlgorithmId::Main => exact::main(
                    spec.model,
                    spec.oracle,
                    require(spec.profile, spec.algorithm)?,
                    spec.eps,
                )?,
                AlgorithmId::Analysis => exact::analysis(
                    spec.model,
                    spec.oracle,
                    require(spec.profile, spec.algorithm)?,
                    spec.eps,
                )?,
                AlgorithmId::CommitQuery => {
                    return Err(CliError::Validation(
                        "commit-query is a building block, not a runnable algorithm".into(),
                    ))
                }
            };
            let opt = expected_opt(spec.model, spec.oracle, OptMode::Exact)?;
            (
                eval.expected_cover,
                eval.expected_queries,
                outcome_count(spec.model),
                opt,
                0.0,
            )
        }
        RunMode::MonteCarlo => {
            let results: Vec<(usize, usize)> = (0..spec.trials)
                .into_par_iter()
                .map(|trial| {
                    let trial_seed = rng::derive(spec.seed, trial);
                    run_once(spec, trial_seed).map(|r| (r.cover_size(), r.queried_edges))
                })
                .collect::<Result<Vec<_>>>()?;
            let t = spec.trials as f64;
            let mean_cover = results.iter().map(|&(c, _)| c as f64).sum::<f64>() / t;
            let mean_queries = results.iter().map(|&(_, q)| q as f64).sum::<f64>() / t;

            let (opt, opt_se) = if exact_opt_feasible(spec.model) {
                (expected_opt(spec.model, spec.oracle, OptMode::Exact)?, 0.0)
            } else {
                let opt_seed = rng::derive(spec.seed, u64::MAX);
                let sizes: Vec<usize> = (0..spec.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let s = rng::derive(opt_seed, trial);
                        let real = spec.model.sample(s);
                        let edges: Vec<(u32, u32)> = base.realized_edges(&real).collect();
                        spec.oracle
                            .cover(n, &edges, rng::derive(s, 1))
                            .map(|c| c.size())
                            .map_err(CliError::from)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / t;
                let var = sizes
                    .iter()
                    .map(|&s| (s as f64 - mean).powi(2))
                    .sum::<f64>()
                    / (t - 1.0).max(1.0);
                (mean, (var / t).sqrt())
            };
            (mean_cover, mean_queries, spec.trials, opt, opt_se)
        }
    };

    let ratio = if opt > 0.0 { mean_cover / opt } else { 1.0 };
    let norm_queries = if n > 0 {
        mean_queries * spec.eps * p_min / n as f64
    } else {
        0.0
    };
    Ok(ReportRow {
        instance: spec.instance_id.to_string(),
        algorithm: spec.algorithm.name().to_string(),
        n,
        m,
        p_min,
        eps: spec.eps,
        trials: trials_reported,
        mean_cover,
        opt,
        opt_se,
        ratio,
        mean_queries,
        norm_queries,
        wall_ms: timing.then(|| started.elapsed().as_millis() as u64),
    })
}

fn require(profile: Option<&MarginalProfile>, algorithm: AlgorithmId) -> Result<&MarginalProfile> {
    profile.ok_or_else(|| {
        CliError::Validation(format!(
            "algorithm {} needs a marginal profile",
            algorithm.name()
        ))
    })
}

fn exact_opt_feasible(model: &Model) -> bool {
    let base = model.base();
    if base.vertex_count() > 64 {
        return false;
    }
    let free = match model {
        Model::Independent(_) => (0..base.edge_count())
            .filter(|&i| base.prob(i).value() < 1.0)
            .count(),
        Model::Correlated(m) => m
            .e1_indices()
            .iter()
            .filter(|&&i| base.prob(i).value() < 1.0)
            .count(),
    };
    free <= 16
}

/// The marginal profile an algorithm cell will consume, per configuration.
pub fn profile_for(
    model: &Model,
    oracle: &CoverOracle,
    mode: MarginalMode,
    eps: f64,
    delta: f64,
    seed: u64,
    samples_override: Option<u64>,
) -> Result<MarginalProfile> {
    let profile = match mode {
        MarginalMode::Exact => exact_marginals(model, oracle)?,
        MarginalMode::Estimate => match samples_override {
            Some(samples) => estimate_marginals_with_samples(model, oracle, samples, seed)?,
            None => estimate_marginals(model, oracle, eps, delta, seed)?,
        },
    };
    Ok(profile)
}

/// Runs the configured sweep: one row per (instance, algorithm).
pub fn run_experiment(config: &ExperimentConfig, timing: bool) -> Result<Vec<ReportRow>> {
    config.validate()?;
    let oracle = config.oracle.build(TieBreak::Canonical);
    let algorithms = config.algorithm_ids();
    let mut rows = Vec::new();
    for (instance_index, path) in config.instances.iter().enumerate() {
        let parsed: ParsedInstance = parse_instance(path)?;
        let model = parsed.to_model()?;
        let instance_seed = rng::derive(config.seed, instance_index as u64);

        let needs_profile = algorithms
            .iter()
            .any(|a| !matches!(a, AlgorithmId::Hallucinate));
        let profile = if needs_profile {
            Some(
                profile_for(
                    &model,
                    &oracle,
                    config.marginal_mode,
                    config.eps,
                    config.delta,
                    rng::derive(instance_seed, 0x9a3f),
                    config.marginal_samples,
                )
                .map_err(|e| tag(&parsed.id, e))?,
            )
        } else {
            None
        };

        for (algorithm_index, &algorithm) in algorithms.iter().enumerate() {
            let spec = CellSpec {
                instance_id: &parsed.id,
                model: &model,
                algorithm,
                oracle: &oracle,
                profile: profile.as_ref(),
                eps: config.eps,
                mode: config.mode,
                trials: config.trials,
                seed: rng::derive(instance_seed, algorithm_index as u64 + 1),
            };
            rows.push(run_cell(&spec, timing).map_err(|e| tag(&parsed.id, e))?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use stochastic_vc::graph::{BaseGraph, Prob};

    fn triangle_model() -> Model {
        Model::Independent(
            BaseGraph::build(
                3,
                &[
                    (0, 1, Prob::ratio(1, 2)),
                    (0, 2, Prob::ratio(1, 2)),
                    (1, 2, Prob::ratio(1, 2)),
                ],
            )
            .unwrap(),
        )
    }

    /// Reported ratios never fall more than three combined standard errors
    /// below 1: every trial's cover is at least as large as that trial's
    /// optimum, so only sampling noise can push the ratio under 1.
    #[test]
    fn monte_carlo_ratio_stays_above_one_minus_noise() {
        let model = triangle_model();
        let oracle = CoverOracle::exact();
        let profile = exact_marginals(&model, &oracle).unwrap();
        for (i, algorithm) in AlgorithmId::all().into_iter().enumerate() {
            let spec = CellSpec {
                instance_id: "triangle",
                model: &model,
                algorithm,
                oracle: &oracle,
                profile: Some(&profile),
                eps: 0.05,
                mode: RunMode::MonteCarlo,
                trials: 400,
                seed: 1000 + i as u64,
            };
            let row = run_cell(&spec, false).unwrap();
            assert!(row.opt > 0.0);

            // Recover the per-trial cover sizes to estimate their spread.
            let sizes: Vec<f64> = (0..spec.trials)
                .map(|trial| {
                    run_once(&spec, rng::derive(spec.seed, trial))
                        .unwrap()
                        .cover_size() as f64
                })
                .collect();
            let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
            assert!((mean - row.mean_cover).abs() < 1e-12);
            let var =
                sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (sizes.len() as f64 - 1.0);
            let cover_se = (var / sizes.len() as f64).sqrt();
            let combined_se = (cover_se.powi(2) + row.opt_se.powi(2)).sqrt();
            assert!(
                row.ratio >= 1.0 - 3.0 * combined_se / row.opt,
                "{}: ratio {} below noise floor",
                algorithm.name(),
                row.ratio
            );
        }
    }

    /// Exact-mode rows on the empty graph use the opt = 0 convention.
    #[test]
    fn empty_graph_reports_unit_ratio() {
        let model = Model::Independent(BaseGraph::build(4, &[]).unwrap());
        let oracle = CoverOracle::exact();
        let profile = exact_marginals(&model, &oracle).unwrap();
        let spec = CellSpec {
            instance_id: "empty",
            model: &model,
            algorithm: AlgorithmId::Main,
            oracle: &oracle,
            profile: Some(&profile),
            eps: 0.05,
            mode: RunMode::Exact,
            trials: 8,
            seed: 0,
        };
        let row = run_cell(&spec, false).unwrap();
        assert_eq!(row.ratio, 1.0);
        assert_eq!(row.mean_queries, 0.0);
        assert_eq!(row.opt, 0.0);
    }
}
