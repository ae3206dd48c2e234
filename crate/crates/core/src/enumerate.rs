//! Shared machinery for exact weighted enumeration of realization spaces.
//!
//! Outcomes are edge-subset masks with probability weights. Weights carry a
//! compensated f64 value and, when every contributing probability was given
//! as an exact rational, a `BigRational` that the accumulators prefer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Prob};
use crate::model::Model;
use crate::oracle::CoverOracle;
use std::collections::HashMap;

/// Edge-count ceiling for exact enumeration of an independent block.
pub const ENUMERATION_EDGE_LIMIT: usize = 22;

/// Vertex-count ceiling for mask-based cover bookkeeping.
pub const ENUMERATION_VERTEX_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub(crate) struct Weight {
    pub f: f64,
    pub exact: Option<BigRational>,
}

impl Weight {
    pub fn one() -> Self {
        Weight {
            f: 1.0,
            exact: Some(BigRational::one()),
        }
    }

    fn ratio(n: u64, d: u64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Multiplies by `p` (edge present) or `1 - p` (edge absent).
    pub fn times_prob(&self, p: Prob, present: bool) -> Weight {
        let f = if present {
            self.f * p.value()
        } else {
            self.f * (1.0 - p.value())
        };
        let exact = match (&self.exact, p.exact()) {
            (Some(w), Some((n, d))) => {
                let factor = if present {
                    Self::ratio(n, d)
                } else {
                    BigRational::one() - Self::ratio(n, d)
                };
                Some(w * factor)
            }
            _ => None,
        };
        Weight { f, exact }
    }

    pub fn scaled(&self, p: Prob) -> Weight {
        Weight {
            f: self.f * p.value(),
            exact: match (&self.exact, p.exact()) {
                (Some(w), Some((n, d))) => Some(w * Self::ratio(n, d)),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub mask: u64,
    pub weight: Weight,
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Weighted accumulator preferring the exact rational track when every
/// added weight carries one.
#[derive(Debug, Clone)]
pub(crate) struct WeightSum {
    kahan: Kahan,
    exact: Option<BigRational>,
}

impl WeightSum {
    pub fn zero() -> Self {
        WeightSum {
            kahan: Kahan::default(),
            exact: Some(BigRational::zero()),
        }
    }

    pub fn add(&mut self, w: &Weight, factor: f64) {
        self.kahan.add(w.f * factor);
        self.exact = match (self.exact.take(), &w.exact) {
            (Some(acc), Some(x)) => {
                // Integer factors keep the rational track exact.
                debug_assert_eq!(factor, factor.trunc());
                Some(acc + x * BigRational::from(BigInt::from(factor as i64)))
            }
            _ => None,
        };
    }

    pub fn value(&self) -> f64 {
        match &self.exact {
            Some(r) => r.to_f64().unwrap_or(self.kahan.value()),
            None => self.kahan.value(),
        }
    }
}

fn check_edge_budget(free_edges: usize) -> Result<()> {
    if free_edges > ENUMERATION_EDGE_LIMIT {
        return Err(Error::InstanceTooLarge {
            what: "edges (exact enumeration)",
            actual: free_edges,
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }
    Ok(())
}

/// All realizations of the independent edges listed in `free` (base-graph
/// indices), each outcome extending `fixed_mask`, weight starting at `w0`.
fn enumerate_free_edges(
    base: &BaseGraph,
    free: &[usize],
    fixed_mask: u64,
    w0: Weight,
    out: &mut Vec<Outcome>,
) {
    fn recurse(
        base: &BaseGraph,
        free: &[usize],
        depth: usize,
        mask: u64,
        weight: Weight,
        out: &mut Vec<Outcome>,
    ) {
        if depth == free.len() {
            out.push(Outcome { mask, weight });
            return;
        }
        let idx = free[depth];
        let p = base.prob(idx);
        recurse(
            base,
            free,
            depth + 1,
            mask | 1 << idx,
            weight.times_prob(p, true),
            out,
        );
        if p.value() < 1.0 {
            recurse(
                base,
                free,
                depth + 1,
                mask,
                weight.times_prob(p, false),
                out,
            );
        }
    }
    recurse(base, free, 0, fixed_mask, w0, out);
}

/// Every outcome of the model as a weighted edge mask.
pub(crate) fn enumerate_model(model: &Model) -> Result<Vec<Outcome>> {
    let base = model.base();
    if base.edge_count() > 64 {
        return Err(Error::InstanceTooLarge {
            what: "edges (mask representation)",
            actual: base.edge_count(),
            limit: 64,
        });
    }
    let mut out = Vec::new();
    match model {
        Model::Independent(g) => {
            let free: Vec<usize> = (0..g.edge_count()).collect();
            check_edge_budget(free.len())?;
            enumerate_free_edges(g, &free, 0, Weight::one(), &mut out);
        }
        Model::Correlated(m) => {
            let e1 = m.e1_indices();
            check_edge_budget(e1.len())?;
            for scenario in m.scenarios() {
                let mut fixed = 0u64;
                for &ei in scenario.realized() {
                    fixed |= 1 << ei;
                }
                let w0 = Weight::one().scaled(scenario.prob());
                enumerate_free_edges(base, &e1, fixed, w0, &mut out);
            }
        }
    }
    Ok(out)
}

/// Memoized canonical-oracle covers keyed by realized edge mask. Vertex
/// sets are returned as masks, so the graph must fit in 64 vertices.
pub(crate) struct CoverTable<'a> {
    base: &'a BaseGraph,
    oracle: &'a CoverOracle,
    cache: HashMap<u64, u64>,
}

impl<'a> CoverTable<'a> {
    pub fn new(base: &'a BaseGraph, oracle: &'a CoverOracle) -> Result<Self> {
        if !oracle.is_canonical() {
            return Err(Error::NonCanonicalOracle);
        }
        if base.vertex_count() > ENUMERATION_VERTEX_LIMIT {
            return Err(Error::InstanceTooLarge {
                what: "vertices (exact enumeration)",
                actual: base.vertex_count(),
                limit: ENUMERATION_VERTEX_LIMIT,
            });
        }
        Ok(CoverTable {
            base,
            oracle,
            cache: HashMap::new(),
        })
    }

    /// Vertex mask of the oracle cover of the realized edges in `mask`.
    pub fn cover_mask(&mut self, mask: u64) -> Result<u64> {
        if let Some(&c) = self.cache.get(&mask) {
            return Ok(c);
        }
        let edges: Vec<(u32, u32)> = (0..self.base.edge_count())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.base.edge(i))
            .collect();
        let cover = self.oracle.cover(self.base.vertex_count(), &edges, 0)?;
        let vmask = cover.vertices().as_mask().expect("vertex count checked");
        self.cache.insert(mask, vmask);
        Ok(vmask)
    }
}

/// Edge mask of the subgraph of `base` induced by the complement of the
/// vertex mask `committed`.
pub(crate) fn uncommitted_edge_mask(base: &BaseGraph, committed: u64) -> u64 {
    let mut mask = 0u64;
    for (i, &(u, v)) in base.edges().iter().enumerate() {
        if committed >> u & 1 == 0 && committed >> v & 1 == 0 {
            mask |= 1 << i;
        }
    }
    mask
}
