//! Exact expectations and exhaustive validity sweeps for the algorithms,
//! computed by weighted enumeration of every realization and every internal
//! randomness outcome, with oracle covers memoized per edge mask.
//!
//! The served realization and the internal hallucinations are independent,
//! and a conditionally completed realization is distributed exactly like a
//! fresh model draw; the evaluators below factor along those independencies
//! and enumerate each factor fully. The integration tests certify them
//! against direct nested enumeration on small instances.

use std::collections::HashMap;

use crate::enumerate::{enumerate_model, uncommitted_edge_mask, CoverTable, Outcome, WeightSum};
use crate::error::{Error, Result};
use crate::graph::BaseGraph;
use crate::marginals::MarginalProfile;
use crate::model::Model;
use crate::oracle::CoverOracle;

use super::{select_tau, AlgorithmId};

/// Exact run-level expectations of one algorithm.
#[derive(Debug, Clone)]
pub struct ExactEvaluation {
    pub algorithm: AlgorithmId,
    pub expected_cover: f64,
    pub expected_queries: f64,
    pub tau: Option<f64>,
    pub eps_internal: Option<f64>,
    /// Per-vertex inclusion probability `Pr[v in S]`; empty when the
    /// evaluator does not produce it (best-of-two).
    pub inclusion: Vec<f64>,
}

struct Engine<'a> {
    base: &'a BaseGraph,
    outcomes: Vec<Outcome>,
    table: CoverTable<'a>,
}

impl<'a> Engine<'a> {
    fn new(model: &'a Model, oracle: &'a CoverOracle) -> Result<Self> {
        Ok(Engine {
            base: model.base(),
            outcomes: enumerate_model(model)?,
            table: CoverTable::new(model.base(), oracle)?,
        })
    }

    fn n(&self) -> usize {
        self.base.vertex_count()
    }

    /// Per-vertex cover marginals of a fresh model draw.
    fn marginals(&mut self) -> Result<Vec<f64>> {
        let n = self.n();
        let mut acc = vec![WeightSum::zero(); n];
        for i in 0..self.outcomes.len() {
            let cover = self.table.cover_mask(self.outcomes[i].mask)?;
            let w = self.outcomes[i].weight.clone();
            for (v, a) in acc.iter_mut().enumerate() {
                if cover >> v & 1 == 1 {
                    a.add(&w, 1.0);
                }
            }
        }
        Ok(acc.iter().map(WeightSum::value).collect())
    }

    /// Groups hallucination outcomes by the committed set they induce.
    fn commit_groups(&mut self, commit_of_cover: impl Fn(u64) -> u64) -> Result<Vec<(u64, f64)>> {
        let mut groups: HashMap<u64, WeightSum> = HashMap::new();
        for i in 0..self.outcomes.len() {
            let cover = self.table.cover_mask(self.outcomes[i].mask)?;
            let p = commit_of_cover(cover);
            let w = self.outcomes[i].weight.clone();
            groups.entry(p).or_insert_with(WeightSum::zero).add(&w, 1.0);
        }
        let mut out: Vec<(u64, f64)> = groups.into_iter().map(|(p, w)| (p, w.value())).collect();
        out.sort_by_key(|&(p, _)| p);
        Ok(out)
    }

    /// Expected cover size and per-vertex inclusion of the oracle cover of
    /// a fresh draw restricted to the edges in `hmask`.
    fn restricted_cover_stats(&mut self, hmask: u64) -> Result<(f64, Vec<f64>)> {
        let n = self.n();
        let mut size = WeightSum::zero();
        let mut incl = vec![WeightSum::zero(); n];
        for i in 0..self.outcomes.len() {
            let cover = self.table.cover_mask(self.outcomes[i].mask & hmask)?;
            let w = self.outcomes[i].weight.clone();
            size.add(&w, cover.count_ones() as f64);
            for (v, a) in incl.iter_mut().enumerate() {
                if cover >> v & 1 == 1 {
                    a.add(&w, 1.0);
                }
            }
        }
        Ok((size.value(), incl.iter().map(WeightSum::value).collect()))
    }
}

fn profile_mask(profile: &MarginalProfile, pred: impl Fn(f64) -> bool) -> u64 {
    profile
        .c_v
        .iter()
        .enumerate()
        .fold(0u64, |m, (v, &c)| if pred(c) { m | 1 << v } else { m })
}

fn effective_eps(profile: &MarginalProfile, eps: f64) -> f64 {
    if profile.is_exact() {
        eps
    } else {
        eps / 2.0
    }
}

/// Exact expectations of the hallucination algorithm: the committed set and
/// the completed cover are independent draws of the same cover law, so
/// `Pr[v in S] = p_v + (1 - p_v) c_v` with both factors enumerated.
pub fn hallucinate(model: &Model, oracle: &CoverOracle) -> Result<ExactEvaluation> {
    let mut engine = Engine::new(model, oracle)?;
    let marg = engine.marginals()?;
    let groups = engine.commit_groups(|cover| cover)?;

    let n = engine.n();
    let mut in_p = vec![0.0f64; n];
    let mut queries = 0.0f64;
    for &(p, w) in &groups {
        for (v, acc) in in_p.iter_mut().enumerate() {
            if p >> v & 1 == 1 {
                *acc += w;
            }
        }
        queries += w * uncommitted_edge_mask(engine.base, p).count_ones() as f64;
    }
    let inclusion: Vec<f64> = (0..n)
        .map(|v| in_p[v] + (1.0 - in_p[v]) * marg[v])
        .collect();
    Ok(ExactEvaluation {
        algorithm: AlgorithmId::Hallucinate,
        expected_cover: inclusion.iter().sum(),
        expected_queries: queries,
        tau: None,
        eps_internal: None,
        inclusion,
    })
}

/// Exact expectations of the threshold algorithm: committed vertices are in
/// the output surely, everything else with its own marginal.
pub fn threshold(
    model: &Model,
    oracle: &CoverOracle,
    profile: &MarginalProfile,
    eps: f64,
) -> Result<ExactEvaluation> {
    super::check_eps(eps)?;
    let mut engine = Engine::new(model, oracle)?;
    let marg = engine.marginals()?;
    let pmask = profile_mask(profile, |c| c >= 0.5 - eps);
    let hmask = uncommitted_edge_mask(engine.base, pmask);

    let inclusion: Vec<f64> = (0..engine.n())
        .map(|v| if pmask >> v & 1 == 1 { 1.0 } else { marg[v] })
        .collect();
    Ok(ExactEvaluation {
        algorithm: AlgorithmId::Threshold,
        expected_cover: inclusion.iter().sum(),
        expected_queries: hmask.count_ones() as f64,
        tau: None,
        eps_internal: Some(eps),
        inclusion,
    })
}

/// Exact expectations of the banded commit algorithm by grouping
/// hallucination outcomes by the committed set they induce and enumerating
/// the served realization restricted to each leftover subgraph.
pub fn main(
    model: &Model,
    oracle: &CoverOracle,
    profile: &MarginalProfile,
    eps: f64,
) -> Result<ExactEvaluation> {
    super::check_eps(eps)?;
    let eps_eff = effective_eps(profile, eps);
    let tau = select_tau(&profile.c_v, eps_eff);
    let fixed = profile_mask(profile, |c| c > tau);
    let band = profile_mask(profile, |c| (1.0 - tau - eps_eff..=tau).contains(&c));

    let mut engine = Engine::new(model, oracle)?;
    let groups = engine.commit_groups(|cover| fixed | (band & cover))?;

    let n = engine.n();
    let mut expected_cover = 0.0f64;
    let mut queries = 0.0f64;
    let mut inclusion = vec![0.0f64; n];
    let mut by_h: HashMap<u64, (f64, Vec<f64>)> = HashMap::new();
    for &(p, w) in &groups {
        let hmask = uncommitted_edge_mask(engine.base, p);
        if let std::collections::hash_map::Entry::Vacant(slot) = by_h.entry(hmask) {
            slot.insert(engine.restricted_cover_stats(hmask)?);
        }
        let (size, incl) = &by_h[&hmask];
        expected_cover += w * (p.count_ones() as f64 + size);
        queries += w * hmask.count_ones() as f64;
        for (v, acc) in inclusion.iter_mut().enumerate() {
            *acc += w * if p >> v & 1 == 1 { 1.0 } else { incl[v] };
        }
    }
    Ok(ExactEvaluation {
        algorithm: AlgorithmId::Main,
        expected_cover,
        expected_queries: queries,
        tau: Some(tau),
        eps_internal: Some(eps_eff),
        inclusion,
    })
}

/// Exact expectations of the analysis variant: the completed cover is a
/// fresh draw of the cover law, independent of the committed set, so
/// `Pr[v in S] = p_v + (1 - p_v) c_v` with `p_v` the commit probability.
pub fn analysis(
    model: &Model,
    oracle: &CoverOracle,
    profile: &MarginalProfile,
    eps: f64,
) -> Result<ExactEvaluation> {
    super::check_eps(eps)?;
    let eps_eff = effective_eps(profile, eps);
    let tau = select_tau(&profile.c_v, eps_eff);
    let fixed = profile_mask(profile, |c| c > tau);
    let band = profile_mask(profile, |c| (1.0 - tau - eps_eff..=tau).contains(&c));

    let mut engine = Engine::new(model, oracle)?;
    let marg = engine.marginals()?;
    let groups = engine.commit_groups(|cover| fixed | (band & cover))?;

    let n = engine.n();
    let mut in_p = vec![0.0f64; n];
    let mut queries = 0.0f64;
    for &(p, w) in &groups {
        for (v, acc) in in_p.iter_mut().enumerate() {
            if p >> v & 1 == 1 {
                *acc += w;
            }
        }
        queries += w * uncommitted_edge_mask(engine.base, p).count_ones() as f64;
    }
    let inclusion: Vec<f64> = (0..n)
        .map(|v| in_p[v] + (1.0 - in_p[v]) * marg[v])
        .collect();
    Ok(ExactEvaluation {
        algorithm: AlgorithmId::Analysis,
        expected_cover: inclusion.iter().sum(),
        expected_queries: queries,
        tau: Some(tau),
        eps_internal: Some(eps_eff),
        inclusion,
    })
}

/// Exact expected size of the best-of-two output, `E[min(|S1|, |S2|)]`.
///
/// Conditioned on the served realization restricted to the union of the two
/// query sets, the two candidate sizes are independent; their conditional
/// distributions are enumerated over the respective hallucination spaces
/// and combined through survival functions. Independent models only.
pub fn best_of_two(
    model: &Model,
    oracle: &CoverOracle,
    profile: &MarginalProfile,
    eps: f64,
) -> Result<ExactEvaluation> {
    super::check_eps(eps)?;
    let Model::Independent(_) = model else {
        return Err(Error::Unsupported(
            "exact best-of-two evaluation supports independent models only",
        ));
    };
    let mut engine = Engine::new(model, oracle)?;
    let base = engine.base;
    let m = base.edge_count();
    let n = engine.n();

    let p2 = profile_mask(profile, |c| c >= 0.5 - eps);
    let h2 = uncommitted_edge_mask(base, p2);
    let groups = engine.commit_groups(|cover| cover)?;

    // Survival function of |P ∪ cover(fixed | hallucination over free)|.
    let mut survival_memo: HashMap<(u64, u64, u64), Vec<f64>> = HashMap::new();

    let mut expected_cover = 0.0f64;
    let mut queries = 0.0f64;
    for &(p1, w1) in &groups {
        let h1 = uncommitted_edge_mask(base, p1);
        let shared = h1 | h2;
        let shared_edges: Vec<usize> = (0..m).filter(|&i| shared >> i & 1 == 1).collect();
        queries += w1 * shared.count_ones() as f64;

        let mut contribution = 0.0f64;
        enumerate_weighted_submasks(base, &shared_edges, |xmask, wx| {
            let sa = survival_of(
                &mut survival_memo,
                base,
                &mut engine.table,
                p1,
                h1,
                xmask & h1,
                n,
            );
            let sb = survival_of(
                &mut survival_memo,
                base,
                &mut engine.table,
                p2,
                h2,
                xmask & h2,
                n,
            );
            let emin: f64 = (1..=n).map(|k| sa[k] * sb[k]).sum();
            contribution += wx * emin;
        });
        expected_cover += w1 * contribution;
    }

    Ok(ExactEvaluation {
        algorithm: AlgorithmId::BestOfTwo,
        expected_cover,
        expected_queries: queries,
        tau: None,
        eps_internal: Some(eps),
        inclusion: Vec::new(),
    })
}

/// Survival function `k -> Pr[|P ∪ cover| >= k]` of the candidate built
/// from the fixed observed part of its query set plus a hallucination of
/// everything else.
fn survival_of(
    memo: &mut HashMap<(u64, u64, u64), Vec<f64>>,
    base: &BaseGraph,
    table: &mut CoverTable,
    p: u64,
    h: u64,
    fixed: u64,
    n: usize,
) -> Vec<f64> {
    if let Some(s) = memo.get(&(p, h, fixed)) {
        return s.clone();
    }
    let free: Vec<usize> = (0..base.edge_count())
        .filter(|&i| h >> i & 1 == 0)
        .collect();
    let mut dist = vec![0.0f64; n + 1];
    enumerate_weighted_submasks(base, &free, |halluc, w| {
        let cover = table
            .cover_mask(fixed | halluc)
            .expect("canonical table built");
        let size = (p | cover).count_ones() as usize;
        dist[size] += w;
    });
    let mut survival = vec![0.0f64; n + 1];
    let mut acc = 0.0;
    for k in (0..=n).rev() {
        acc += dist[k];
        survival[k] = acc;
    }
    memo.insert((p, h, fixed), survival.clone());
    survival
}

/// Calls `f` with every subset of the given edges and its probability
/// weight under independent sampling.
fn enumerate_weighted_submasks(base: &BaseGraph, edges: &[usize], mut f: impl FnMut(u64, f64)) {
    fn recurse(
        base: &BaseGraph,
        edges: &[usize],
        depth: usize,
        mask: u64,
        weight: f64,
        f: &mut impl FnMut(u64, f64),
    ) {
        if depth == edges.len() {
            f(mask, weight);
            return;
        }
        let idx = edges[depth];
        let p = base.prob(idx).value();
        recurse(base, edges, depth + 1, mask | 1 << idx, weight * p, f);
        if p < 1.0 {
            recurse(base, edges, depth + 1, mask, weight * (1.0 - p), f);
        }
    }
    recurse(base, edges, 0, 0, 1.0, &mut f);
}

/// Counters of an exhaustive cover-validity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepReport {
    /// Combinations of (served realization restriction, internal
    /// randomness) examined.
    pub combinations: u64,
    /// Realized edges left uncovered across all combinations.
    pub uncovered_edges: u64,
}

/// Sweeps every realization and every internal-randomness outcome of the
/// given algorithm, counting realized edges its output fails to cover.
///
/// A run with served realization `rho` and completion `kappa` behaves
/// exactly like the enumerated pair with mask `(rho & H) | (kappa & !H)`;
/// edges outside `H` must be covered by the committed set and are checked
/// separately against every base edge. Independent models only.
pub fn validity_sweep(
    model: &Model,
    oracle: &CoverOracle,
    profile: Option<&MarginalProfile>,
    eps: Option<f64>,
    algorithm: AlgorithmId,
) -> Result<SweepReport> {
    let Model::Independent(_) = model else {
        return Err(Error::Unsupported(
            "validity sweeps support independent models only",
        ));
    };
    let mut engine = Engine::new(model, oracle)?;
    let base = engine.base;
    let n = engine.n();
    let m = base.edge_count();

    // Edge mask covered by a vertex mask.
    let mut incidence = vec![0u64; n];
    for (i, &(u, v)) in base.edges().iter().enumerate() {
        incidence[u as usize] |= 1 << i;
        incidence[v as usize] |= 1 << i;
    }
    let covered_edges = |vmask: u64| -> u64 {
        let mut out = 0u64;
        let mut bits = vmask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= incidence[v];
        }
        out
    };
    let all_edges: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

    fn need(req: Option<&MarginalProfile>) -> Result<&MarginalProfile> {
        req.ok_or_else(|| Error::ParameterOutOfRange("algorithm needs a marginal profile".into()))
    }

    let mut combos = 0u64;
    let mut uncovered = 0u64;

    // Checks one committed set + cover pair against a realized mask whose
    // queried part is `real_mask & h`.
    let mut check = |p: u64, h: u64, real_mask: u64, cover_vmask: u64| {
        let covered = covered_edges(cover_vmask | p);
        uncovered += (real_mask & h & !covered).count_ones() as u64;
        let covered_by_p = covered_edges(p);
        uncovered += (all_edges & !h & !covered_by_p).count_ones() as u64;
    };

    match algorithm {
        AlgorithmId::Hallucinate => {
            let groups = engine.commit_groups(|cover| cover)?;
            for &(p, _) in &groups {
                let h = uncommitted_edge_mask(base, p);
                for j in 0..engine.outcomes.len() {
                    let g2 = engine.outcomes[j].mask;
                    let cover = engine.table.cover_mask(g2)?;
                    combos += 1;
                    check(p, h, g2, cover);
                }
            }
        }
        AlgorithmId::Threshold => {
            let profile = need(profile)?;
            let eps = eps.ok_or_else(|| Error::ParameterOutOfRange("eps required".into()))?;
            let p = profile_mask(profile, |c| c >= 0.5 - eps);
            let h = uncommitted_edge_mask(base, p);
            for j in 0..engine.outcomes.len() {
                let g2 = engine.outcomes[j].mask;
                let cover = engine.table.cover_mask(g2)?;
                combos += 1;
                check(p, h, g2, cover);
            }
        }
        AlgorithmId::Main | AlgorithmId::Analysis => {
            let profile = need(profile)?;
            let eps = eps.ok_or_else(|| Error::ParameterOutOfRange("eps required".into()))?;
            let eps_eff = effective_eps(profile, eps);
            let tau = select_tau(&profile.c_v, eps_eff);
            let fixed = profile_mask(profile, |c| c > tau);
            let band = profile_mask(profile, |c| (1.0 - tau - eps_eff..=tau).contains(&c));
            let groups = engine.commit_groups(|cover| fixed | (band & cover))?;
            for &(p, _) in &groups {
                let h = uncommitted_edge_mask(base, p);
                for j in 0..engine.outcomes.len() {
                    let rho = engine.outcomes[j].mask;
                    let cover = if algorithm == AlgorithmId::Main {
                        engine.table.cover_mask(rho & h)?
                    } else {
                        engine.table.cover_mask(rho)?
                    };
                    combos += 1;
                    check(p, h, rho, cover);
                }
            }
        }
        AlgorithmId::BestOfTwo => {
            let profile = need(profile)?;
            let eps = eps.ok_or_else(|| Error::ParameterOutOfRange("eps required".into()))?;
            let p2 = profile_mask(profile, |c| c >= 0.5 - eps);
            let h2 = uncommitted_edge_mask(base, p2);
            let groups = engine.commit_groups(|cover| cover)?;
            let masks: Vec<u64> = engine.outcomes.iter().map(|o| o.mask).collect();
            for &(p1, _) in &groups {
                let h1 = uncommitted_edge_mask(base, p1);
                let shared = h1 & h2;
                for &a in &masks {
                    let cover_a = engine.table.cover_mask(a)?;
                    let size1 = (p1 | cover_a).count_ones();
                    for &b in &masks {
                        if a & shared != b & shared {
                            continue;
                        }
                        let cover_b = engine.table.cover_mask(b)?;
                        let size2 = (p2 | cover_b).count_ones();
                        combos += 1;
                        if size2 < size1 {
                            check(p2, h2, b, cover_b);
                        } else {
                            check(p1, h1, a, cover_a);
                        }
                    }
                }
            }
        }
        AlgorithmId::CommitQuery => {
            return Err(Error::Unsupported(
                "validity sweep targets the five algorithms",
            ));
        }
    }

    Ok(SweepReport {
        combinations: combos,
        uncovered_edges: uncovered,
    })
}
