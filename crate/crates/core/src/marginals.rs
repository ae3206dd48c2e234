//! Exact and sampled per-vertex inclusion probabilities.
//!
//! For a fixed oracle, `c_v` is the probability that vertex `v` joins the
//! oracle cover of a fresh realization, `c_e` the probability that edge `e`
//! is covered by it, and `opt = sum_v c_v` the expected cover size. Exact
//! values come from full weighted enumeration of the realization space and
//! therefore require a canonical (deterministic) oracle; estimates draw
//! realizations and count inclusion frequencies.

use rayon::prelude::*;

use crate::enumerate::{enumerate_model, CoverTable, WeightSum};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::oracle::CoverOracle;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Exact,
    Estimated {
        samples: u64,
        eps: f64,
        delta: f64,
        seed: u64,
    },
}

/// Per-vertex and per-edge coverage probabilities with their expected
/// optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalProfile {
    pub c_v: Vec<f64>,
    pub c_e: Vec<f64>,
    pub opt: f64,
    pub provenance: Provenance,
}

impl MarginalProfile {
    pub fn is_exact(&self) -> bool {
        matches!(self.provenance, Provenance::Exact)
    }
}

/// Exact marginals by weighted enumeration of every realization.
pub fn exact_marginals(model: &Model, oracle: &CoverOracle) -> Result<MarginalProfile> {
    let base = model.base();
    let outcomes = enumerate_model(model)?;
    let mut table = CoverTable::new(base, oracle)?;

    let n = base.vertex_count();
    let m = base.edge_count();
    let mut c_v = vec![WeightSum::zero(); n];
    let mut c_e = vec![WeightSum::zero(); m];
    let mut opt = WeightSum::zero();
    for outcome in &outcomes {
        let cover = table.cover_mask(outcome.mask)?;
        for (v, acc) in c_v.iter_mut().enumerate() {
            if cover >> v & 1 == 1 {
                acc.add(&outcome.weight, 1.0);
            }
        }
        for (i, acc) in c_e.iter_mut().enumerate() {
            let (u, v) = base.edge(i);
            if cover >> u & 1 == 1 || cover >> v & 1 == 1 {
                acc.add(&outcome.weight, 1.0);
            }
        }
        opt.add(&outcome.weight, cover.count_ones() as f64);
    }

    Ok(MarginalProfile {
        c_v: c_v.iter().map(WeightSum::value).collect(),
        c_e: c_e.iter().map(WeightSum::value).collect(),
        opt: opt.value(),
        provenance: Provenance::Exact,
    })
}

/// Sample count `ceil(n^2 / (8 eps^2) * ln(2n / delta))` that makes every
/// estimated marginal accurate to `eps / 2n` with probability `1 - delta`.
pub fn sample_count(n: usize, eps: f64, delta: f64) -> Result<u64> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("eps = {eps}, need > 0")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "delta = {delta}, need (0, 1)"
        )));
    }
    if n == 0 {
        return Ok(1);
    }
    let nf = n as f64;
    let t = nf * nf / (8.0 * eps * eps) * (2.0 * nf / delta).ln();
    Ok(t.ceil() as u64)
}

/// Estimated marginals from the prescribed number of samples.
pub fn estimate_marginals(
    model: &Model,
    oracle: &CoverOracle,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<MarginalProfile> {
    let samples = sample_count(model.vertex_count(), eps, delta)?;
    let mut profile = estimate_marginals_with_samples(model, oracle, samples, seed)?;
    profile.provenance = Provenance::Estimated {
        samples,
        eps,
        delta,
        seed,
    };
    Ok(profile)
}

/// Estimated marginals from a caller-chosen sample count: draws `samples`
/// realizations, applies the oracle to each, and reports per-vertex and
/// per-edge inclusion frequencies.
///
/// Trials are distributed over the rayon pool; per-trial seeds derive from
/// `(seed, trial index)` and the counts are integers, so the result does
/// not depend on the worker count.
pub fn estimate_marginals_with_samples(
    model: &Model,
    oracle: &CoverOracle,
    samples: u64,
    seed: u64,
) -> Result<MarginalProfile> {
    if samples == 0 {
        return Err(Error::ParameterOutOfRange("samples must be >= 1".into()));
    }
    let base = model.base();
    let n = base.vertex_count();
    let m = base.edge_count();

    struct Counts {
        vertex: Vec<u64>,
        edge: Vec<u64>,
        cover_total: u64,
    }

    let counts = (0..samples)
        .into_par_iter()
        .try_fold(
            || Counts {
                vertex: vec![0; n],
                edge: vec![0; m],
                cover_total: 0,
            },
            |mut acc, trial| -> Result<Counts> {
                let trial_seed = rng::derive(seed, trial);
                let realization = model.sample(trial_seed);
                let edges: Vec<(u32, u32)> = base.realized_edges(&realization).collect();
                let cover = oracle.cover(n, &edges, rng::derive(trial_seed, 1))?;
                for v in cover.vertices().iter() {
                    acc.vertex[v as usize] += 1;
                }
                for (i, &(u, v)) in base.edges().iter().enumerate() {
                    if cover.vertices().contains(u) || cover.vertices().contains(v) {
                        acc.edge[i] += 1;
                    }
                }
                acc.cover_total += cover.size() as u64;
                Ok(acc)
            },
        )
        .try_reduce(
            || Counts {
                vertex: vec![0; n],
                edge: vec![0; m],
                cover_total: 0,
            },
            |mut a, b| {
                for (x, y) in a.vertex.iter_mut().zip(&b.vertex) {
                    *x += y;
                }
                for (x, y) in a.edge.iter_mut().zip(&b.edge) {
                    *x += y;
                }
                a.cover_total += b.cover_total;
                Ok(a)
            },
        )?;

    let t = samples as f64;
    Ok(MarginalProfile {
        c_v: counts.vertex.iter().map(|&c| c as f64 / t).collect(),
        c_e: counts.edge.iter().map(|&c| c as f64 / t).collect(),
        opt: counts.cover_total as f64 / t,
        provenance: Provenance::Estimated {
            samples,
            eps: f64::NAN,
            delta: f64::NAN,
            seed,
        },
    })
}

#[derive(Debug, Clone, Copy)]
pub enum OptMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Expected size of the oracle cover of a fresh realization.
pub fn expected_opt(model: &Model, oracle: &CoverOracle, mode: OptMode) -> Result<f64> {
    match mode {
        OptMode::Exact => {
            let outcomes = enumerate_model(model)?;
            let mut table = CoverTable::new(model.base(), oracle)?;
            let mut acc = WeightSum::zero();
            for outcome in &outcomes {
                let cover = table.cover_mask(outcome.mask)?;
                acc.add(&outcome.weight, cover.count_ones() as f64);
            }
            Ok(acc.value())
        }
        OptMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::ParameterOutOfRange("trials must be >= 1".into()));
            }
            let base = model.base();
            let total: u64 = (0..trials)
                .map(|trial| {
                    let trial_seed = rng::derive(seed, trial);
                    let realization = model.sample(trial_seed);
                    let edges: Vec<(u32, u32)> = base.realized_edges(&realization).collect();
                    oracle
                        .cover(base.vertex_count(), &edges, rng::derive(trial_seed, 1))
                        .map(|c| c.size() as u64)
                })
                .sum::<Result<u64>>()?;
            Ok(total as f64 / trials as f64)
        }
    }
}
