//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its headline numbers (run with `--nocapture` to see them).
//!
//! Small instances are checked by full weighted enumeration, where the
//! guarantees must hold outright to tight tolerances; moderate scales are
//! checked as ratio and scaling properties with pinned budgets.

use std::time::Instant;

use rayon::prelude::*;

use stochastic_vc::commit::{self, exact, AlgorithmId};
use stochastic_vc::corpus;
use stochastic_vc::graph::{BaseGraph, Prob};
use stochastic_vc::lowerbound::{
    build_lowerbound_instance, disjoint_matchings_rs, replicate_instance, six_cycle_rs,
    LowerBoundInstance,
};
use stochastic_vc::marginals::{
    estimate_marginals, estimate_marginals_with_samples, exact_marginals, expected_opt,
    sample_count, OptMode,
};
use stochastic_vc::model::Model;
use stochastic_vc::oracle::CoverOracle;
use stochastic_vc::rng;

const EPS: f64 = 0.05;
const TOL: f64 = 1e-9;

fn corpus_models() -> Vec<Model> {
    corpus::small_instance_corpus()
        .into_iter()
        .map(Model::Independent)
        .collect()
}

/// Criterion 1: the branch-and-bound solver agrees with brute force on at
/// least 500 random graphs with up to 10 vertices, within 30 seconds.
#[test]
fn criterion_01_oracle_correctness() {
    let started = Instant::now();
    let graphs = corpus::random_graphs(500, 10, 0x0c1e);
    let exact_oracle = CoverOracle::exact();
    let brute_oracle = CoverOracle::bruteforce();
    for (i, g) in graphs.iter().enumerate() {
        let edges = g.edges().to_vec();
        let a = exact_oracle.cover(g.vertex_count(), &edges, 0).unwrap();
        let b = brute_oracle.cover(g.vertex_count(), &edges, 0).unwrap();
        assert_eq!(a.size(), b.size(), "graph {i}");
        assert!(stochastic_vc::is_vertex_cover(
            edges.iter().copied(),
            a.vertices()
        ));
        assert!(stochastic_vc::is_vertex_cover(
            edges.iter().copied(),
            b.vertices()
        ));
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!(
        "[criterion 1] PASS — exact == bruteforce on {} graphs (n <= 10) in {elapsed:?}",
        graphs.len()
    );
}

/// Criterion 2: exhaustive sweep over every realization and every
/// internal-randomness outcome on all corpus instances with at most 8
/// edges — zero uncovered edges for all five algorithms.
#[test]
fn criterion_02_cover_validity_probability_one() {
    let oracle = CoverOracle::exact();
    let models: Vec<Model> = corpus_models()
        .into_iter()
        .filter(|m| m.edge_count() <= 8)
        .collect();
    assert!(models.len() >= 100, "only {} sweep instances", models.len());

    let totals: Vec<(u64, u64)> = models
        .par_iter()
        .map(|model| {
            let profile = exact_marginals(model, &oracle).unwrap();
            let mut combos = 0u64;
            let mut uncovered = 0u64;
            for algorithm in AlgorithmId::all() {
                let report =
                    exact::validity_sweep(model, &oracle, Some(&profile), Some(EPS), algorithm)
                        .unwrap();
                combos += report.combinations;
                uncovered += report.uncovered_edges;
            }
            (combos, uncovered)
        })
        .collect();

    let combos: u64 = totals.iter().map(|&(c, _)| c).sum();
    let uncovered: u64 = totals.iter().map(|&(_, u)| u).sum();
    assert_eq!(uncovered, 0, "uncovered edges found");
    println!(
        "[criterion 2] PASS — {} instances, {combos} outcome combinations, 0 uncovered edges",
        models.len()
    );
}

/// Criterion 3: exact `E|S|` of the banded commit algorithm is within
/// `(1.5 + eps) opt + 1e-9` on the whole corpus, in under 5 minutes.
#[test]
fn criterion_03_three_halves_guarantee() {
    let started = Instant::now();
    let oracle = CoverOracle::exact();
    let models = corpus_models();
    assert!(models.len() >= 200);

    let worst = models
        .par_iter()
        .map(|model| {
            let profile = exact_marginals(model, &oracle).unwrap();
            let eval = exact::main(model, &oracle, &profile, EPS).unwrap();
            let bound = (1.5 + EPS) * profile.opt + TOL;
            assert!(
                eval.expected_cover <= bound,
                "E|S| = {} > {} (opt = {})",
                eval.expected_cover,
                bound,
                profile.opt
            );
            if profile.opt > 0.0 {
                eval.expected_cover / profile.opt
            } else {
                1.0
            }
        })
        .reduce(|| 1.0f64, f64::max);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}");
    println!(
        "[criterion 3] PASS — {} instances, worst exact ratio {worst:.6} <= {} in {elapsed:?}",
        models.len(),
        1.5 + EPS
    );
}

/// Criterion 4: warm-up guarantees on the same corpus — hallucination
/// within `2 opt`, threshold within the alpha-dependent bound, best of two
/// within `5/3 + 3 eps`.
#[test]
fn criterion_04_warmup_guarantees() {
    let oracle = CoverOracle::exact();
    let models = corpus_models();

    let worst = models
        .par_iter()
        .map(|model| {
            let profile = exact_marginals(model, &oracle).unwrap();
            let opt = profile.opt;

            let h = exact::hallucinate(model, &oracle).unwrap();
            assert!(
                h.expected_cover <= 2.0 * opt + TOL,
                "hallucinate {} > 2 * {opt}",
                h.expected_cover
            );

            let t = exact::threshold(model, &oracle, &profile, EPS).unwrap();
            let alpha = if opt > 0.0 {
                profile.c_v.iter().filter(|&&c| c < 0.5 - EPS).sum::<f64>() / opt
            } else {
                0.0
            };
            let threshold_bound = opt * (1.0 - alpha * (0.5 + EPS)) / (0.5 - EPS) + TOL;
            assert!(
                t.expected_cover <= threshold_bound,
                "threshold {} > {threshold_bound} (alpha = {alpha}, opt = {opt})",
                t.expected_cover
            );

            let b = exact::best_of_two(model, &oracle, &profile, EPS).unwrap();
            let best_bound = (5.0 / 3.0 + 3.0 * EPS) * opt + TOL;
            assert!(
                b.expected_cover <= best_bound,
                "best-of-two {} > {best_bound} (opt = {opt})",
                b.expected_cover
            );

            if opt > 0.0 {
                b.expected_cover / opt
            } else {
                1.0
            }
        })
        .reduce(|| 1.0f64, f64::max);

    println!(
        "[criterion 4] PASS — {} instances; worst exact best-of-two ratio {worst:.6} <= {:.6}",
        models.len(),
        5.0 / 3.0 + 3.0 * EPS
    );
}

fn law_instances() -> Vec<Model> {
    vec![
        Model::Independent(
            BaseGraph::build(3, &[(0, 1, Prob::ratio(1, 2)), (1, 2, Prob::ratio(1, 2))]).unwrap(),
        ),
        Model::Independent(
            BaseGraph::build(
                3,
                &[
                    (0, 1, Prob::ratio(3, 10)),
                    (0, 2, Prob::ratio(1, 2)),
                    (1, 2, Prob::ratio(1, 1)),
                ],
            )
            .unwrap(),
        ),
        Model::Independent(
            BaseGraph::build(
                6,
                &[
                    (0, 1, Prob::ratio(1, 2)),
                    (0, 2, Prob::ratio(1, 1)),
                    (1, 2, Prob::ratio(1, 2)),
                    (2, 3, Prob::ratio(3, 10)),
                ],
            )
            .unwrap(),
        ),
    ]
}

/// Criterion 5: per-vertex inclusion frequencies over 1e5 Monte-Carlo
/// trials match the closed-form laws within 4 standard errors.
#[test]
fn criterion_05_marginal_laws() {
    const TRIALS: u64 = 100_000;
    let oracle = CoverOracle::exact();
    let mut checked = 0usize;

    for (inst_idx, model) in law_instances().iter().enumerate() {
        let profile = exact_marginals(model, &oracle).unwrap();
        let n = model.vertex_count();
        let tau = commit::select_tau(&profile.c_v, EPS);

        for algorithm in [
            AlgorithmId::Hallucinate,
            AlgorithmId::Threshold,
            AlgorithmId::Analysis,
        ] {
            let base_seed = rng::derive(0xace5, (inst_idx * 8 + algorithm as usize) as u64);
            let counts: Vec<u64> = (0..TRIALS)
                .into_par_iter()
                .fold(
                    || vec![0u64; n],
                    |mut acc, trial| {
                        let seed = rng::derive(base_seed, trial);
                        let run = match algorithm {
                            AlgorithmId::Hallucinate => {
                                commit::run_hallucinate(model, &oracle, seed).unwrap()
                            }
                            AlgorithmId::Threshold => {
                                commit::run_threshold(model, &profile, EPS, &oracle, seed).unwrap()
                            }
                            AlgorithmId::Analysis => {
                                commit::run_analysis(model, &profile, EPS, &oracle, seed).unwrap()
                            }
                            _ => unreachable!(),
                        };
                        for v in run.cover.iter() {
                            acc[v as usize] += 1;
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![0u64; n],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(&b) {
                            *x += y;
                        }
                        a
                    },
                );

            for (v, &c) in profile.c_v.iter().enumerate() {
                let law = match algorithm {
                    AlgorithmId::Hallucinate => c * (2.0 - c),
                    AlgorithmId::Threshold => {
                        if c >= 0.5 - EPS {
                            1.0
                        } else {
                            c
                        }
                    }
                    AlgorithmId::Analysis => {
                        if c > tau {
                            1.0
                        } else if (1.0 - tau - EPS..=tau).contains(&c) {
                            c * (2.0 - c)
                        } else {
                            c
                        }
                    }
                    _ => unreachable!(),
                };
                let freq = counts[v] as f64 / TRIALS as f64;
                let se = (law * (1.0 - law) / TRIALS as f64).sqrt();
                assert!(
                    (freq - law).abs() <= 4.0 * se + 1e-12,
                    "instance {inst_idx} {} vertex {v}: freq {freq} law {law} se {se}",
                    algorithm.name()
                );
                checked += 1;
            }
        }
    }
    println!("[criterion 5] PASS — {checked} vertex laws within 4 standard errors at 1e5 trials");
}

/// Criterion 6: with exact analysis-variant inclusion probabilities, every
/// charging class satisfies `sum(budget) - sum(cost) >= -1e-9` and the
/// global identity ties out.
#[test]
fn criterion_06_budget_ledger() {
    let oracle = CoverOracle::exact();
    let models = corpus_models();

    models.par_iter().for_each(|model| {
        let profile = exact_marginals(model, &oracle).unwrap();
        let eval = exact::analysis(model, &oracle, &profile, EPS).unwrap();
        let tau = eval.tau.unwrap();
        let ledger = commit::budget_ledger(&profile, &eval.inclusion, EPS, tau).unwrap();
        for (k, sum) in ledger.class_sums.iter().enumerate() {
            assert!(
                *sum >= -TOL,
                "class V{} sum {} < -1e-9 (opt = {})",
                k + 1,
                sum,
                profile.opt
            );
        }
        let expected_global = (1.5 + EPS) * profile.opt - eval.inclusion.iter().sum::<f64>();
        assert!(
            (ledger.global - expected_global).abs() <= TOL,
            "global {} vs identity {}",
            ledger.global,
            expected_global
        );
    });

    println!(
        "[criterion 6] PASS — ledger classes nonnegative and identity holds on {} instances",
        models.len()
    );
}

/// Criterion 7: mean queried edges of the banded commit algorithm stay
/// within `C * n / (eps p)` for one fitted constant `C <= 10` across all
/// cells, and the observed growth never outpaces the budget's linear
/// growth in `n` by more than a factor 2. The budget is an upper
/// envelope — several cells sit far inside it — so consistency is checked
/// in the direction the bound constrains.
#[test]
fn criterion_07_query_scaling() {
    let started = Instant::now();
    let oracle = CoverOracle::greedy2();
    const TRIALS: u64 = 100;
    const PROFILE_SAMPLES: u64 = 300;

    let mut cells = Vec::new();
    for &n in &[50usize, 100, 200] {
        for &p in &[0.1f64, 0.3] {
            for &eps in &[0.05f64, 0.1] {
                cells.push((n, p, eps));
            }
        }
    }

    let ratios: Vec<(usize, f64, f64, f64, f64)> = cells
        .par_iter()
        .map(|&(n, p, eps)| {
            let base = corpus::erdos_renyi(n, 0.2, Prob::new(p), 0x9e0 + n as u64);
            let model = Model::Independent(base);
            let cell_seed = rng::derive(
                0x7ca1e,
                (n as u64) << 8 | ((p * 10.0) as u64) << 4 | (eps * 100.0) as u64,
            );
            let profile = estimate_marginals_with_samples(
                &model,
                &oracle,
                PROFILE_SAMPLES,
                rng::derive(cell_seed, 1),
            )
            .unwrap();
            let total_queries: u64 = (0..TRIALS)
                .map(|trial| {
                    let run = commit::run_main(
                        &model,
                        &profile,
                        eps,
                        &oracle,
                        rng::derive(cell_seed, 100 + trial),
                    )
                    .unwrap();
                    run.queried_edges as u64
                })
                .sum();
            let mean_queries = total_queries as f64 / TRIALS as f64;
            let budget = n as f64 / (eps * p);
            (n, p, eps, mean_queries, mean_queries / budget)
        })
        .collect();

    let fitted_c = ratios.iter().map(|&(_, _, _, _, r)| r).fold(0.0, f64::max);
    for &(n, p, eps, q, r) in &ratios {
        println!(
            "[criterion 7]   cell n={n} p={p} eps={eps}: mean queries {q:.1}, normalized {r:.4}"
        );
    }
    assert!(fitted_c <= 10.0, "fitted constant {fitted_c} > 10");

    // Growth along n, per (p, eps) family: observed factor at most twice
    // the linear prediction.
    let mut worst_excess = 0.0f64;
    for &(na, pa, ea, qa, _) in &ratios {
        for &(nb, pb, eb, qb, _) in &ratios {
            if pa == pb && ea == eb && nb > na {
                let predicted = nb as f64 / na as f64;
                let observed = qb / qa;
                worst_excess = worst_excess.max(observed / predicted);
                assert!(
                    observed <= 2.0 * predicted,
                    "p={pa} eps={ea}: queries grew {observed:.2}x from n={na} to n={nb}, \
                     budget predicts {predicted}x"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    println!(
        "[criterion 7] PASS — fitted C = {fitted_c:.4} <= 10; growth in n at most \
         {worst_excess:.3}x the linear budget (<= 2); {elapsed:?}"
    );
}

/// Criterion 8: the prescribed 77-sample estimator puts every marginal
/// within `eps / 2n` often enough over 200 repetitions.
#[test]
fn criterion_08_estimator_guarantee() {
    let oracle = CoverOracle::exact();
    let base =
        BaseGraph::build(6, &[(0, 1, Prob::ratio(1, 20)), (2, 3, Prob::ratio(1, 1))]).unwrap();
    let model = Model::Independent(base);
    let exact_profile = exact_marginals(&model, &oracle).unwrap();

    let eps = 0.5;
    let delta = 1.0 / 6.0;
    let t = sample_count(model.vertex_count(), eps, delta).unwrap();
    assert_eq!(t, 77, "prescribed sample count");
    let threshold = eps / (2.0 * model.vertex_count() as f64);

    const RUNS: u64 = 200;
    let successes: u64 = (0..RUNS)
        .into_par_iter()
        .map(|run| {
            let est =
                estimate_marginals(&model, &oracle, eps, delta, rng::derive(0xe571, run)).unwrap();
            let max_err = est
                .c_v
                .iter()
                .zip(&exact_profile.c_v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            (max_err <= threshold) as u64
        })
        .sum();

    let rate = successes as f64 / RUNS as f64;
    let required = (1.0 - delta) - 0.07;
    assert!(
        rate >= required - 1e-12,
        "success rate {rate} below {required}"
    );
    println!(
        "[criterion 8] PASS — t = {t}, max-error <= eps/12 in {successes}/{RUNS} runs \
         (needed {required:.4})"
    );
}

/// Criterion 9: rerunning the banded commit algorithm with the greedy
/// 2-approximate oracle defining both the covers and the marginals stays
/// within `(1.5 * 2 + eps)` of the greedy-relative optimum.
#[test]
fn criterion_09_approximate_oracle_degradation() {
    let oracle = CoverOracle::greedy2();
    let models = corpus_models();

    let worst = models
        .par_iter()
        .map(|model| {
            let profile = exact_marginals(model, &oracle).unwrap();
            let eval = exact::main(model, &oracle, &profile, EPS).unwrap();
            let bound = (1.5 * 2.0 + EPS) * profile.opt + TOL;
            assert!(
                eval.expected_cover <= bound,
                "greedy-backed E|S| = {} > {bound} (greedy opt = {})",
                eval.expected_cover,
                profile.opt
            );
            if profile.opt > 0.0 {
                eval.expected_cover / profile.opt
            } else {
                1.0
            }
        })
        .reduce(|| 1.0f64, f64::max);

    println!(
        "[criterion 9] PASS — {} instances; worst greedy-relative ratio {worst:.6} <= {}",
        models.len(),
        1.5 * 2.0 + EPS
    );
}

/// Criterion 10: lower-bound accounting. The closed-form optimum matches
/// brute force on every enumerable outcome of the 6-cycle instance, the
/// zero-budget ratio is exactly 4/3 at `eps2 = 1/2`, and the replicated
/// family at `eps2 = 1/50` sits exactly at `1.5 / (1 + 2 eps2)` for every
/// counting-rule budget up to 10% of the edges.
#[test]
fn criterion_10_lower_bound_accounting() {
    // (a) closed form == brute force on all 3 * 2^6 outcomes.
    let inst = build_lowerbound_instance(&six_cycle_rs(), Prob::ratio(1, 2)).unwrap();
    let outcomes = enumerate_lb_outcomes(&inst);
    assert_eq!(outcomes.len(), 3 * 64);
    let brute = CoverOracle::bruteforce();
    let base = inst.base();
    let all_edges: Vec<usize> = (0..base.edge_count()).collect();
    for &mask in &outcomes {
        let pinned = stochastic_vc::Realization::from_mask(base.edge_count(), mask);
        let realization = inst
            .model()
            .complete_conditionally(&pinned, &all_edges, 0)
            .unwrap();
        let edges: Vec<(u32, u32)> = base.realized_edges(&realization).collect();
        let brute_size = brute.cover(base.vertex_count(), &edges, 0).unwrap().size();
        assert_eq!(inst.exact_opt_lb(&realization).unwrap(), brute_size);
    }

    // (b) zero-budget forced/opt = 4/3 exactly at eps2 = 1/2.
    let forced = inst.nonadaptive_forced_cover(&[]);
    let opt = inst.expected_opt();
    assert!((forced - 4.0).abs() <= TOL);
    assert!((opt - 3.0).abs() <= TOL);
    assert!((forced / opt - 4.0 / 3.0).abs() <= TOL);

    // (c) replicated family matching the asymptotic ratio exactly: side
    // and matching size solve (2s - r) / (2(s - r) + eps2 r) = 1.5 / (1 +
    // 2 eps2) at eps2 = 1/50, i.e. 193 r = 92 s.
    let eps2 = Prob::ratio(1, 50);
    let rs = disjoint_matchings_rs(193, 92, 2).unwrap();
    let proto = build_lowerbound_instance(&rs, eps2).unwrap();
    let family = replicate_instance(&proto, 3).unwrap();
    let target = 1.5 / (1.0 + 2.0 * eps2.value());
    let opt = family.expected_opt();
    for fraction in [0.0, 0.05, 0.10] {
        let budget = (fraction * family.edge_count() as f64).floor() as usize;
        let q = family.counting_rule_budget(budget);
        assert_eq!(q.len(), budget);
        let ratio = family.nonadaptive_forced_cover(&q) / opt;
        assert!(
            (ratio - target).abs() <= TOL,
            "budget {budget}: ratio {ratio} vs {target}"
        );
    }
    // Once the budget exhausts the exterior edges and spills into the
    // matchings, the forced cover shrinks toward the optimum.
    let spill = family.counting_rule_budget(family.edge_count());
    let fully_queried = family.nonadaptive_forced_cover(&spill);
    assert!((fully_queried - opt).abs() <= TOL, "full query != opt");

    println!(
        "[criterion 10] PASS — closed form == brute force on 192 outcomes; 4/3 at eps2=1/2; \
         replicated ratio {target:.9} for budgets <= 10%"
    );
}

fn enumerate_lb_outcomes(inst: &LowerBoundInstance) -> Vec<u64> {
    let model = inst.model();
    let e1 = model.e1_indices();
    let mut out = Vec::new();
    for scenario in model.scenarios() {
        let mut fixed = 0u64;
        for &ei in scenario.realized() {
            fixed |= 1 << ei;
        }
        for bits in 0..1u64 << e1.len() {
            let mut mask = fixed;
            for (j, &ei) in e1.iter().enumerate() {
                if bits >> j & 1 == 1 {
                    mask |= 1 << ei;
                }
            }
            out.push(mask);
        }
    }
    out
}

/// Criterion 11: the banded commit algorithm keeps its guarantee on the
/// mildly correlated 6-cycle instance without knowing the edge partition.
#[test]
fn criterion_11_mild_correlation_robustness() {
    let oracle = CoverOracle::exact();
    for eps2 in [Prob::ratio(1, 50), Prob::ratio(1, 2)] {
        let inst = build_lowerbound_instance(&six_cycle_rs(), eps2).unwrap();
        let model = Model::Correlated(inst.model().clone());
        let profile = exact_marginals(&model, &oracle).unwrap();
        let opt = expected_opt(&model, &oracle, OptMode::Exact).unwrap();
        // The scenario-enumerated optimum matches the accounting form.
        assert!(
            (opt - inst.expected_opt()).abs() <= TOL,
            "enumerated opt {} vs accounting {}",
            opt,
            inst.expected_opt()
        );
        let eval = exact::main(&model, &oracle, &profile, EPS).unwrap();
        let bound = (1.5 + EPS) * opt + TOL;
        assert!(
            eval.expected_cover <= bound,
            "eps2 = {}: E|S| = {} > {bound}",
            eps2.value(),
            eval.expected_cover
        );
        println!(
            "[criterion 11] PASS — eps2 = {}: exact E|S| = {:.9} <= {:.9} = (1.5+eps) opt",
            eps2.value(),
            eval.expected_cover,
            (1.5 + EPS) * opt
        );
    }
}
