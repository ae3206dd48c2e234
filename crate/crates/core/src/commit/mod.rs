//! The commit-then-query framework and its algorithms.
//!
//! Every algorithm here fixes a committed vertex set `P`, queries only the
//! edges of `H = G[V \ P]`, and returns `P` together with a cover of the
//! realized `H` edges, so the output covers the realization no matter how
//! the queries turn out. The algorithms differ in how they choose `P`:
//!
//! * [`run_hallucinate`] commits the oracle cover of a hallucinated
//!   realization.
//! * [`run_threshold`] commits every vertex whose inclusion marginal is at
//!   least `0.5 - eps`.
//! * [`run_best_of_two`] runs both on the same served realization and keeps
//!   the smaller cover.
//! * [`run_main`] picks a threshold `tau`, always commits vertices with
//!   `c_v > tau`, and commits mid-band vertices only when a hallucinated
//!   cover agrees.
//! * [`run_analysis`] is the variant whose per-vertex inclusion law is
//!   predictable in closed form; it covers the queried realization with a
//!   conditionally completed full-graph cover.

pub mod exact;

use crate::error::{Error, Result};
use crate::graph::{is_vertex_cover, BaseGraph, Realization, VertexSet};
use crate::marginals::MarginalProfile;
use crate::model::Model;
use crate::oracle::CoverOracle;
use crate::rng;

const STREAM_REAL: u64 = 0;
const STREAM_G1: u64 = 1;
const STREAM_COMPLETE: u64 = 2;
const STREAM_ALT: u64 = 3;
const STREAM_ORACLE: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Hallucinate,
    Threshold,
    BestOfTwo,
    Main,
    Analysis,
    CommitQuery,
}

impl AlgorithmId {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::Hallucinate => "hallucinate",
            AlgorithmId::Threshold => "threshold",
            AlgorithmId::BestOfTwo => "best-of-two",
            AlgorithmId::Main => "main",
            AlgorithmId::Analysis => "analysis",
            AlgorithmId::CommitQuery => "commit-query",
        }
    }

    /// The five runnable algorithms, in reporting order.
    pub fn all() -> [AlgorithmId; 5] {
        [
            AlgorithmId::Hallucinate,
            AlgorithmId::Threshold,
            AlgorithmId::BestOfTwo,
            AlgorithmId::Main,
            AlgorithmId::Analysis,
        ]
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hallucinate" => Ok(AlgorithmId::Hallucinate),
            "threshold" => Ok(AlgorithmId::Threshold),
            "best-of-two" => Ok(AlgorithmId::BestOfTwo),
            "main" => Ok(AlgorithmId::Main),
            "analysis" => Ok(AlgorithmId::Analysis),
            other => Err(Error::ParameterOutOfRange(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

/// A committed vertex set plus the induced subgraph it leaves to query.
#[derive(Debug, Clone)]
pub struct CommitPlan {
    pub committed: VertexSet,
    /// `H = G[V \ committed]`.
    pub subgraph: BaseGraph,
    /// Base-graph index of each `H` edge; exactly the queried edges.
    pub edge_map: Vec<usize>,
}

pub fn commit_plan(base: &BaseGraph, committed: &VertexSet) -> CommitPlan {
    let keep = committed.complement();
    let (subgraph, edge_map) = base.induced_subgraph(&keep);
    CommitPlan {
        committed: committed.clone(),
        subgraph,
        edge_map,
    }
}

/// Outcome of one algorithm run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub algorithm: AlgorithmId,
    pub cover: VertexSet,
    /// Number of base edges queried, `|E(H)|`.
    pub queried_edges: usize,
    pub seed: u64,
    pub tau: Option<f64>,
    /// Effective accuracy parameter, halved when the profile is estimated.
    pub eps_internal: Option<f64>,
    /// Sizes of the two candidate covers for the best-of-two run.
    pub component_sizes: Option<(usize, usize)>,
}

impl RunResult {
    pub fn cover_size(&self) -> usize {
        self.cover.len()
    }
}

/// The realization served to any algorithm run with this seed; lets a
/// harness validate a returned cover against what the run actually saw.
pub fn served_realization(model: &Model, seed: u64) -> Realization {
    model.sample(rng::derive(seed, STREAM_REAL))
}

/// Queries exactly the edges of `H = G[V \ committed]` in the realization
/// and returns `committed` united with an oracle cover of the realized `H`
/// edges.
pub fn commit_then_query(
    base: &BaseGraph,
    committed: &VertexSet,
    realization: &Realization,
    oracle: &CoverOracle,
    seed: u64,
) -> Result<RunResult> {
    let plan = commit_plan(base, committed);
    let realized: Vec<(u32, u32)> = plan
        .edge_map
        .iter()
        .filter(|&&i| realization.present(i))
        .map(|&i| base.edge(i))
        .collect();
    let cover = oracle.cover(
        base.vertex_count(),
        &realized,
        rng::derive(seed, STREAM_ORACLE),
    )?;
    let mut out = committed.clone();
    out.union_with(cover.vertices());
    debug_assert!(is_vertex_cover(base.realized_edges(realization), &out));
    Ok(RunResult {
        algorithm: AlgorithmId::CommitQuery,
        cover: out,
        queried_edges: plan.edge_map.len(),
        seed,
        tau: None,
        eps_internal: None,
        component_sizes: None,
    })
}

fn realized_edges_of(base: &BaseGraph, realization: &Realization) -> Vec<(u32, u32)> {
    base.realized_edges(realization).collect()
}

/// Commits the oracle cover of one hallucinated realization, then covers
/// the queried edges with the oracle cover of those edges completed by a
/// fresh hallucination of everything unqueried.
pub fn run_hallucinate(model: &Model, oracle: &CoverOracle, seed: u64) -> Result<RunResult> {
    let real = model.sample(rng::derive(seed, STREAM_REAL));
    Ok(hallucinate_on(model, oracle, &real, seed)?.0)
}

fn hallucinate_on(
    model: &Model,
    oracle: &CoverOracle,
    real: &Realization,
    seed: u64,
) -> Result<(RunResult, Vec<usize>)> {
    let base = model.base();
    let n = base.vertex_count();
    let g1 = model.sample(rng::derive(seed, STREAM_G1));
    let committed = oracle
        .cover(
            n,
            &realized_edges_of(base, &g1),
            rng::derive(seed, STREAM_ORACLE),
        )?
        .into_vertices();
    let plan = commit_plan(base, &committed);
    let completed =
        model.complete_conditionally(real, &plan.edge_map, rng::derive(seed, STREAM_COMPLETE))?;
    let m = oracle.cover(
        n,
        &realized_edges_of(base, &completed),
        rng::derive(seed, STREAM_ORACLE + 1),
    )?;
    let mut cover = committed;
    cover.union_with(m.vertices());
    debug_assert!(is_vertex_cover(base.realized_edges(real), &cover));
    let result = RunResult {
        algorithm: AlgorithmId::Hallucinate,
        cover,
        queried_edges: plan.edge_map.len(),
        seed,
        tau: None,
        eps_internal: None,
        component_sizes: None,
    };
    Ok((result, plan.edge_map))
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("eps = {eps}, need > 0")));
    }
    Ok(())
}

/// Committed set of the threshold rule: every vertex with
/// `c_v >= 0.5 - eps` (boundary inclusive).
pub fn threshold_commit_set(profile: &MarginalProfile, eps: f64) -> VertexSet {
    let n = profile.c_v.len();
    let mut p = VertexSet::empty(n);
    for (v, &c) in profile.c_v.iter().enumerate() {
        if c >= 0.5 - eps {
            p.insert(v as u32);
        }
    }
    p
}

/// Commits every vertex whose marginal reaches `0.5 - eps`; off-committed
/// vertices then join the output only with their own marginal probability.
pub fn run_threshold(
    model: &Model,
    profile: &MarginalProfile,
    eps: f64,
    oracle: &CoverOracle,
    seed: u64,
) -> Result<RunResult> {
    check_eps(eps)?;
    let real = model.sample(rng::derive(seed, STREAM_REAL));
    Ok(threshold_on(model, profile, eps, oracle, &real, seed)?.0)
}

fn threshold_on(
    model: &Model,
    profile: &MarginalProfile,
    eps: f64,
    oracle: &CoverOracle,
    real: &Realization,
    seed: u64,
) -> Result<(RunResult, Vec<usize>)> {
    let base = model.base();
    let committed = threshold_commit_set(profile, eps);
    let plan = commit_plan(base, &committed);
    let completed =
        model.complete_conditionally(real, &plan.edge_map, rng::derive(seed, STREAM_COMPLETE))?;
    let m = oracle.cover(
        base.vertex_count(),
        &realized_edges_of(base, &completed),
        rng::derive(seed, STREAM_ORACLE),
    )?;
    let mut cover = committed;
    cover.union_with(m.vertices());
    debug_assert!(is_vertex_cover(base.realized_edges(real), &cover));
    let result = RunResult {
        algorithm: AlgorithmId::Threshold,
        cover,
        queried_edges: plan.edge_map.len(),
        seed,
        tau: None,
        eps_internal: Some(eps),
        component_sizes: None,
    };
    Ok((result, plan.edge_map))
}

/// Runs the hallucination and threshold algorithms on the same served
/// realization with independent internal randomness and returns the smaller
/// cover; both cover that realization, so the minimum does too. Ties keep
/// the hallucination result. The queried count is the union of the two
/// query sets.
pub fn run_best_of_two(
    model: &Model,
    profile: &MarginalProfile,
    eps: f64,
    oracle: &CoverOracle,
    seed: u64,
) -> Result<RunResult> {
    check_eps(eps)?;
    let real = model.sample(rng::derive(seed, STREAM_REAL));
    let (first, queried_first) = hallucinate_on(model, oracle, &real, seed)?;
    let (second, queried_second) = threshold_on(
        model,
        profile,
        eps,
        oracle,
        &real,
        rng::derive(seed, STREAM_ALT),
    )?;

    let mut queried: std::collections::HashSet<usize> = queried_first.into_iter().collect();
    queried.extend(queried_second);

    let sizes = (first.cover_size(), second.cover_size());
    let chosen = if second.cover_size() < first.cover_size() {
        second
    } else {
        first
    };
    Ok(RunResult {
        algorithm: AlgorithmId::BestOfTwo,
        cover: chosen.cover,
        queried_edges: queried.len(),
        seed,
        tau: None,
        eps_internal: Some(eps),
        component_sizes: Some(sizes),
    })
}

/// Smallest grid point of `[0.5, 1]` at which the mass above the threshold
/// is balanced by the mass below its mirror:
/// `sum_{c_v > tau} c_v <= sum_{c_v < 1 - tau - eps} c_v`.
///
/// Both sums are step functions of `tau`; the grid holds every breakpoint
/// (`0.5`, `1`, each `c_v`, each `1 - c_v - eps` that lands in range) plus
/// the midpoints of consecutive breakpoints, so the returned value behaves
/// identically to the true infimum under the comparisons the algorithms
/// make. `tau = 1` is always feasible.
pub fn select_tau(c_v: &[f64], eps: f64) -> f64 {
    let mut points: Vec<f64> = vec![0.5, 1.0];
    for &c in c_v {
        if (0.5..=1.0).contains(&c) {
            points.push(c);
        }
        let mirror = 1.0 - c - eps;
        if (0.5..=1.0).contains(&mirror) {
            points.push(mirror);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut grid = Vec::with_capacity(points.len() * 2);
    for w in points.windows(2) {
        grid.push(w[0]);
        grid.push((w[0] + w[1]) / 2.0);
    }
    grid.push(*points.last().unwrap());

    let feasible = |tau: f64| {
        let above: f64 = c_v.iter().filter(|&&c| c > tau).sum();
        let below: f64 = c_v.iter().filter(|&&c| c < 1.0 - tau - eps).sum();
        above <= below
    };
    for &tau in &grid {
        if feasible(tau) {
            return tau;
        }
    }
    1.0
}

/// The committed set of the main algorithm for a given hallucinated cover:
/// all vertices with `c_v > tau`, plus band vertices
/// (`1 - tau - eps <= c_v <= tau`) that the hallucinated cover contains.
pub fn main_commit_set(
    profile: &MarginalProfile,
    eps: f64,
    tau: f64,
    hallucinated: &VertexSet,
) -> VertexSet {
    let n = profile.c_v.len();
    let mut p = VertexSet::empty(n);
    for (v, &c) in profile.c_v.iter().enumerate() {
        if c > tau || ((1.0 - tau - eps..=tau).contains(&c) && hallucinated.contains(v as u32)) {
            p.insert(v as u32);
        }
    }
    p
}

fn effective_eps(profile: &MarginalProfile, eps: f64) -> f64 {
    if profile.is_exact() {
        eps
    } else {
        eps / 2.0
    }
}

/// The banded commit algorithm: queries only the subgraph left uncommitted
/// by `main_commit_set` and covers its realized edges directly.
pub fn run_main(
    model: &Model,
    profile: &MarginalProfile,
    eps: f64,
    oracle: &CoverOracle,
    seed: u64,
) -> Result<RunResult> {
    check_eps(eps)?;
    let base = model.base();
    let eps_eff = effective_eps(profile, eps);
    let real = model.sample(rng::derive(seed, STREAM_REAL));
    let g1 = model.sample(rng::derive(seed, STREAM_G1));
    let hallucinated = oracle
        .cover(
            base.vertex_count(),
            &realized_edges_of(base, &g1),
            rng::derive(seed, STREAM_ORACLE),
        )?
        .into_vertices();
    let tau = select_tau(&profile.c_v, eps_eff);
    let committed = main_commit_set(profile, eps_eff, tau, &hallucinated);
    let plan = commit_plan(base, &committed);
    let realized: Vec<(u32, u32)> = plan
        .edge_map
        .iter()
        .filter(|&&i| real.present(i))
        .map(|&i| base.edge(i))
        .collect();
    let m = oracle.cover(
        base.vertex_count(),
        &realized,
        rng::derive(seed, STREAM_ORACLE + 1),
    )?;
    let mut cover = committed;
    cover.union_with(m.vertices());
    debug_assert!(is_vertex_cover(base.realized_edges(&real), &cover));
    Ok(RunResult {
        algorithm: AlgorithmId::Main,
        cover,
        queried_edges: plan.edge_map.len(),
        seed,
        tau: Some(tau),
        eps_internal: Some(eps_eff),
        component_sizes: None,
    })
}

/// The analysis variant: same committed set as [`run_main`] under the same
/// seed, but the queried realization is covered together with a
/// conditionally completed hallucination of the unqueried edges, which
/// makes the per-vertex inclusion law exact: probability 1 above `tau`,
/// `c_v (2 - c_v)` in the band, `c_v` below it.
pub fn run_analysis(
    model: &Model,
    profile: &MarginalProfile,
    eps: f64,
    oracle: &CoverOracle,
    seed: u64,
) -> Result<RunResult> {
    check_eps(eps)?;
    let base = model.base();
    let eps_eff = effective_eps(profile, eps);
    let real = model.sample(rng::derive(seed, STREAM_REAL));
    let g1 = model.sample(rng::derive(seed, STREAM_G1));
    let hallucinated = oracle
        .cover(
            base.vertex_count(),
            &realized_edges_of(base, &g1),
            rng::derive(seed, STREAM_ORACLE),
        )?
        .into_vertices();
    let tau = select_tau(&profile.c_v, eps_eff);
    let committed = main_commit_set(profile, eps_eff, tau, &hallucinated);
    let plan = commit_plan(base, &committed);
    let completed =
        model.complete_conditionally(&real, &plan.edge_map, rng::derive(seed, STREAM_COMPLETE))?;
    let m = oracle.cover(
        base.vertex_count(),
        &realized_edges_of(base, &completed),
        rng::derive(seed, STREAM_ORACLE + 1),
    )?;
    let mut cover = committed;
    cover.union_with(m.vertices());
    debug_assert!(is_vertex_cover(base.realized_edges(&real), &cover));
    Ok(RunResult {
        algorithm: AlgorithmId::Analysis,
        cover,
        queried_edges: plan.edge_map.len(),
        seed,
        tau: Some(tau),
        eps_internal: Some(eps_eff),
        component_sizes: None,
    })
}

/// Per-vertex surplus (`budget`) and deficit (`cost`) of
/// `(3/2 + eps) c_v` against an algorithm's inclusion probability, split
/// over the three analysis classes.
#[derive(Debug, Clone)]
pub struct Ledger {
    pub budget: Vec<f64>,
    pub cost: Vec<f64>,
    pub class: Vec<LedgerClass>,
    /// `sum(budget) - sum(cost)` per class, in `[V1, V2, V3]` order.
    pub class_sums: [f64; 3],
    /// `sum(budget) - sum(cost)` overall; equals
    /// `(1.5 + eps) * opt - sum_v Pr[v in S]`.
    pub global: f64,
    pub tau: f64,
    pub eps: f64,
}

/// The vertex classes of the charging argument, by marginal value:
/// `V1 = [0.5 - eps, 0.5]`, `V2 = (tau, 1] or [0, 1 - tau - eps)`,
/// `V3` the rest of the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedgerClass {
    V1,
    V2,
    V3,
}

pub fn budget_ledger(
    profile: &MarginalProfile,
    inclusion: &[f64],
    eps: f64,
    tau: f64,
) -> Result<Ledger> {
    if inclusion.len() != profile.c_v.len() {
        return Err(Error::ParameterOutOfRange(format!(
            "inclusion has {} entries for {} vertices",
            inclusion.len(),
            profile.c_v.len()
        )));
    }
    for (v, &q) in inclusion.iter().enumerate() {
        if !(0.0..=1.0 + 1e-12).contains(&q) {
            return Err(Error::ParameterOutOfRange(format!(
                "inclusion probability {q} at vertex {v}"
            )));
        }
    }

    let factor = 1.5 + eps;
    let n = profile.c_v.len();
    let mut budget = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(n);
    let mut class = Vec::with_capacity(n);
    let mut class_sums = [0.0f64; 3];
    let mut global = 0.0f64;

    for (v, (&c, &incl)) in profile.c_v.iter().zip(inclusion).enumerate() {
        let diff = factor * c - incl;
        budget.push(diff.max(0.0));
        cost.push((-diff).max(0.0));

        let in_v1 = (0.5 - eps..=0.5).contains(&c);
        let in_v2 = c > tau || c < 1.0 - tau - eps;
        let in_v3 = (0.5 < c && c <= tau) || (1.0 - tau - eps <= c && c < 0.5 - eps);
        let chosen = match (in_v1, in_v2, in_v3) {
            (true, false, false) => LedgerClass::V1,
            (false, true, false) => LedgerClass::V2,
            (false, false, true) => LedgerClass::V3,
            _ => return Err(Error::PartitionNotDisjoint(v as u32)),
        };
        class.push(chosen);
        class_sums[match chosen {
            LedgerClass::V1 => 0,
            LedgerClass::V2 => 1,
            LedgerClass::V3 => 2,
        }] += diff;
        global += diff;
    }

    Ok(Ledger {
        budget,
        cost,
        class,
        class_sums,
        global,
        tau,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Prob;
    use crate::marginals::{exact_marginals, Provenance};
    use crate::oracle::CoverOracle;

    fn single_edge(p: Prob) -> Model {
        Model::Independent(BaseGraph::build(2, &[(0, 1, p)]).unwrap())
    }

    fn triangle(p: Prob) -> Model {
        Model::Independent(BaseGraph::build(3, &[(0, 1, p), (0, 2, p), (1, 2, p)]).unwrap())
    }

    #[test]
    fn committing_everything_queries_nothing() {
        let model = triangle(Prob::one());
        let base = model.base();
        let real = model.sample(1);
        let run =
            commit_then_query(base, &VertexSet::full(3), &real, &CoverOracle::exact(), 0).unwrap();
        assert_eq!(run.queried_edges, 0);
        assert_eq!(run.cover_size(), 3);
    }

    #[test]
    fn committing_nothing_queries_everything() {
        let model = single_edge(Prob::one());
        let real = model.sample(1);
        let run = commit_then_query(
            model.base(),
            &VertexSet::empty(2),
            &real,
            &CoverOracle::exact(),
            0,
        )
        .unwrap();
        assert_eq!(run.queried_edges, 1);
        assert_eq!(run.cover_size(), 1);
    }

    #[test]
    fn triangle_commit_queries_only_the_far_edge() {
        let model = triangle(Prob::one());
        let real = model.sample(1);
        let committed = VertexSet::from_indices(3, &[0]);
        let run =
            commit_then_query(model.base(), &committed, &real, &CoverOracle::exact(), 0).unwrap();
        assert_eq!(run.queried_edges, 1);
        assert!(run.cover.contains(0));
        assert!(is_vertex_cover(
            model.base().realized_edges(&real),
            &run.cover
        ));
    }

    #[test]
    fn select_tau_examples() {
        assert_eq!(select_tau(&[0.5, 0.5], 0.05), 0.5);
        assert_eq!(select_tau(&[0.9, 0.3, 0.3, 0.3, 0.3], 0.05), 0.5);
        assert_eq!(select_tau(&[0.9, 0.9], 0.05), 0.9);
    }

    #[test]
    fn select_tau_returns_smallest_feasible_grid_point() {
        let feasible = |c_v: &[f64], eps: f64, tau: f64| {
            let above: f64 = c_v.iter().filter(|&&c| c > tau).sum();
            let below: f64 = c_v.iter().filter(|&&c| c < 1.0 - tau - eps).sum();
            above <= below
        };
        let mut rng = crate::rng::SplitMix64::new(31);
        for _ in 0..200 {
            let k = 1 + rng.index(6);
            let c_v: Vec<f64> = (0..k).map(|_| rng.next_f64()).collect();
            let eps = 0.01 + 0.08 * rng.next_f64();
            let tau = select_tau(&c_v, eps);
            assert!((0.5..=1.0).contains(&tau));
            assert!(feasible(&c_v, eps, tau), "tau {tau} infeasible for {c_v:?}");
        }
    }

    #[test]
    fn hallucinate_on_certain_edge_is_optimal() {
        let model = single_edge(Prob::one());
        let run = run_hallucinate(&model, &CoverOracle::exact(), 3).unwrap();
        assert_eq!(run.cover_size(), 1);
        assert!(run.cover.contains(0));
    }

    #[test]
    fn threshold_commits_the_half_marginal_endpoint() {
        let model = single_edge(Prob::ratio(1, 2));
        let oracle = CoverOracle::exact();
        let profile = exact_marginals(&model, &oracle).unwrap();
        let p = threshold_commit_set(&profile, 0.05);
        assert!(p.contains(0));
        assert!(!p.contains(1));
        let run = run_threshold(&model, &profile, 0.05, &oracle, 11).unwrap();
        assert!(run.cover.contains(0));
    }

    #[test]
    fn main_handles_the_empty_graph() {
        let model = Model::Independent(BaseGraph::build(4, &[]).unwrap());
        let oracle = CoverOracle::exact();
        let profile = exact_marginals(&model, &oracle).unwrap();
        let run = run_main(&model, &profile, 0.05, &oracle, 9).unwrap();
        assert_eq!(run.cover_size(), 0);
        assert_eq!(run.queried_edges, 0);
    }

    #[test]
    fn estimated_profiles_halve_eps() {
        let model = single_edge(Prob::ratio(1, 2));
        let oracle = CoverOracle::exact();
        let mut profile = exact_marginals(&model, &oracle).unwrap();
        profile.provenance = Provenance::Estimated {
            samples: 10,
            eps: 0.08,
            delta: 0.1,
            seed: 0,
        };
        let run = run_main(&model, &profile, 0.08, &oracle, 2).unwrap();
        assert_eq!(run.eps_internal, Some(0.04));
    }

    #[test]
    fn main_is_dominated_by_analysis_under_shared_seeds() {
        let oracle = CoverOracle::exact();
        for g in crate::corpus::small_instance_corpus().iter().take(40) {
            let model = Model::Independent(g.clone());
            let profile = exact_marginals(&model, &oracle).unwrap();
            for seed in 0..20 {
                let a = run_main(&model, &profile, 0.05, &oracle, seed).unwrap();
                let b = run_analysis(&model, &profile, 0.05, &oracle, seed).unwrap();
                assert!(
                    a.cover_size() <= b.cover_size(),
                    "main {} > analysis {} at seed {seed}",
                    a.cover_size(),
                    b.cover_size()
                );
            }
        }
    }

    #[test]
    fn best_of_two_returns_the_smaller_candidate() {
        let model = triangle(Prob::ratio(1, 2));
        let oracle = CoverOracle::exact();
        let profile = exact_marginals(&model, &oracle).unwrap();
        for seed in 0..50 {
            let run = run_best_of_two(&model, &profile, 0.05, &oracle, seed).unwrap();
            let (s1, s2) = run.component_sizes.unwrap();
            assert_eq!(run.cover_size(), s1.min(s2));
        }
    }

    #[test]
    fn queried_edges_of_main_are_cheap_or_uncovered() {
        // Every queried edge has marginal mass c_u + c_v <= 1 - eps, or both
        // endpoints sit in the band outside the hallucinated cover.
        let oracle = CoverOracle::exact();
        for g in crate::corpus::small_instance_corpus().iter().take(60) {
            let model = Model::Independent(g.clone());
            let profile = exact_marginals(&model, &oracle).unwrap();
            for seed in 0..10u64 {
                let run = run_main(&model, &profile, 0.05, &oracle, seed).unwrap();
                let eps_eff = run.eps_internal.unwrap();
                let tau = run.tau.unwrap();
                let g1 = model.sample(crate::rng::derive(seed, STREAM_G1));
                let hallucinated = oracle
                    .cover(
                        g.vertex_count(),
                        &g.realized_edges(&g1).collect::<Vec<_>>(),
                        crate::rng::derive(seed, STREAM_ORACLE),
                    )
                    .unwrap()
                    .into_vertices();
                let committed = main_commit_set(&profile, eps_eff, tau, &hallucinated);
                let plan = commit_plan(g, &committed);
                assert_eq!(plan.edge_map.len(), run.queried_edges);
                for &i in &plan.edge_map {
                    let (u, v) = g.edge(i);
                    let (cu, cv) = (profile.c_v[u as usize], profile.c_v[v as usize]);
                    let cheap = cu + cv <= 1.0 - eps_eff + 1e-12;
                    let band = (1.0 - tau - eps_eff..=tau).contains(&cu)
                        && (1.0 - tau - eps_eff..=tau).contains(&cv)
                        && !hallucinated.contains(u)
                        && !hallucinated.contains(v);
                    assert!(cheap || band, "edge ({u},{v}) cu={cu} cv={cv}");
                }
            }
        }
    }

    #[test]
    fn ledger_direct_formula_values() {
        let profile = crate::marginals::MarginalProfile {
            c_v: vec![0.5],
            c_e: vec![],
            opt: 0.5,
            provenance: Provenance::Exact,
        };
        let ledger = budget_ledger(&profile, &[0.75], 0.0, 0.5).unwrap();
        assert_eq!(ledger.budget, vec![0.0]);
        assert_eq!(ledger.cost, vec![0.0]);

        let profile = crate::marginals::MarginalProfile {
            c_v: vec![0.2],
            c_e: vec![],
            opt: 0.2,
            provenance: Provenance::Exact,
        };
        let ledger = budget_ledger(&profile, &[1.0], 0.1, 0.5).unwrap();
        assert!((ledger.cost[0] - 0.68).abs() < 1e-12);
        assert_eq!(ledger.budget[0], 0.0);
    }

    #[test]
    fn ledger_partition_covers_every_vertex_once() {
        let c_v = vec![0.0, 0.1, 0.44, 0.47, 0.5, 0.55, 0.62, 0.9, 1.0];
        let profile = crate::marginals::MarginalProfile {
            c_v: c_v.clone(),
            c_e: vec![],
            opt: c_v.iter().sum(),
            provenance: Provenance::Exact,
        };
        let inclusion = vec![0.5; c_v.len()];
        for tau in [0.5, 0.62, 0.8, 1.0] {
            let ledger = budget_ledger(&profile, &inclusion, 0.05, tau).unwrap();
            // b_v and sigma_v never both positive.
            for (b, s) in ledger.budget.iter().zip(&ledger.cost) {
                assert!(*b >= 0.0 && *s >= 0.0);
                assert_eq!(b * s, 0.0);
            }
            let total: f64 = ledger.class_sums.iter().sum();
            assert!((total - ledger.global).abs() < 1e-9);
        }
    }
}
