//! Base graphs, vertex sets and seeded edge realizations.
//!
//! A [`BaseGraph`] is an undirected graph whose edges carry existence
//! probabilities in `(0, 1]`. A [`Realization`] is one concrete subset of
//! those edges, sampled independently per edge or produced by a correlated
//! model. Both are immutable after construction and safe to share across
//! threads.

use crate::error::{Error, Result};
use crate::rng;

/// An edge existence probability, optionally carrying the exact rational it
/// was parsed from. The exact form is consulted only by the enumeration
/// paths, which rebuild outcome weights from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob {
    value: f64,
    exact: Option<(u64, u64)>,
}

impl Prob {
    pub const fn new(value: f64) -> Self {
        Prob { value, exact: None }
    }

    /// Probability `numer / denom`, remembered exactly.
    pub const fn ratio(numer: u64, denom: u64) -> Self {
        Prob {
            value: numer as f64 / denom as f64,
            exact: Some((numer, denom)),
        }
    }

    pub const fn one() -> Self {
        Prob::ratio(1, 1)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<(u64, u64)> {
        self.exact
    }

    fn valid(&self) -> bool {
        if let Some((n, d)) = self.exact {
            if d == 0 || n == 0 || n > d {
                return false;
            }
        }
        self.value > 0.0 && self.value <= 1.0 && self.value.is_finite()
    }
}

impl From<f64> for Prob {
    fn from(value: f64) -> Self {
        Prob::new(value)
    }
}

/// A set of vertices of a fixed ground set `[0, n)`, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    blocks: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            blocks: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VertexSet::empty(n);
        for v in 0..n {
            s.insert(v as u32);
        }
        s
    }

    pub fn from_indices(n: usize, indices: &[u32]) -> Self {
        let mut s = VertexSet::empty(n);
        for &v in indices {
            s.insert(v);
        }
        s
    }

    /// Size of the ground set, not of the subset.
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: u32) {
        debug_assert!((v as usize) < self.n);
        self.blocks[v as usize / 64] |= 1u64 << (v % 64);
    }

    pub fn contains(&self, v: u32) -> bool {
        (v as usize) < self.n && self.blocks[v as usize / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = VertexSet::empty(self.n);
        for v in 0..self.n as u32 {
            if !self.contains(v) {
                out.insert(v);
            }
        }
        out
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.n == other.n
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n as u32).filter(move |&v| self.contains(v))
    }

    /// The set as a single machine word; available when the ground set fits.
    pub fn as_mask(&self) -> Option<u64> {
        if self.n <= 64 {
            Some(self.blocks.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = VertexSet::empty(n);
        s.blocks[0] = mask;
        s
    }
}

/// A known graph with per-edge existence probabilities.
///
/// Edges are stored canonically: endpoints ordered `u < v`, list sorted by
/// `(u, v)`, no duplicates, no self loops, every probability in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    prob: Vec<Prob>,
}

impl BaseGraph {
    /// Builds a graph from a weighted edge list, canonicalizing edge order.
    pub fn build(n: usize, weighted_edges: &[(u32, u32, Prob)]) -> Result<Self> {
        let mut triples: Vec<(u32, u32, Prob)> = Vec::with_capacity(weighted_edges.len());
        for &(a, b, p) in weighted_edges {
            if a as usize >= n {
                return Err(Error::EndpointOutOfRange { vertex: a, n });
            }
            if b as usize >= n {
                return Err(Error::EndpointOutOfRange { vertex: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !p.valid() {
                let (u, v) = (a.min(b), a.max(b));
                return Err(Error::ProbabilityOutOfRange { u, v, p: p.value() });
            }
            triples.push((a.min(b), a.max(b), p));
        }
        triples.sort_by_key(|&(u, v, _)| (u, v));
        for w in triples.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let edges = triples.iter().map(|&(u, v, _)| (u, v)).collect();
        let prob = triples.iter().map(|&(_, _, p)| p).collect();
        Ok(BaseGraph { n, edges, prob })
    }

    /// Graph with unit probabilities on every listed edge.
    pub fn with_unit_probs(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, Prob::one())).collect();
        BaseGraph::build(n, &weighted)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (u32, u32) {
        self.edges[index]
    }

    pub fn probs(&self) -> &[Prob] {
        &self.prob
    }

    pub fn prob(&self, index: usize) -> Prob {
        self.prob[index]
    }

    /// Canonical index of edge `{u, v}`, if present.
    pub fn edge_index(&self, u: u32, v: u32) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Smallest edge probability; 1 for an empty edge set so that query
    /// budget normalizations stay finite.
    pub fn min_probability(&self) -> f64 {
        self.prob.iter().map(|p| p.value()).fold(1.0, f64::min)
    }

    /// Subgraph induced by `keep`, plus the map from new edge indices back
    /// to indices in `self`.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> (BaseGraph, Vec<usize>) {
        debug_assert_eq!(keep.ground_size(), self.n);
        let mut edges = Vec::new();
        let mut prob = Vec::new();
        let mut map = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if keep.contains(u) && keep.contains(v) {
                edges.push((u, v));
                prob.push(self.prob[i]);
                map.push(i);
            }
        }
        (
            BaseGraph {
                n: self.n,
                edges,
                prob,
            },
            map,
        )
    }

    /// Samples each edge independently with its probability.
    ///
    /// The flag of edge `i` is `uniform(seed, i) < p_i` under the counter
    /// scheme of [`crate::rng`], so a realization depends only on the seed
    /// and the canonical edge order.
    pub fn sample_realization(&self, seed: u64) -> Realization {
        let present = self
            .prob
            .iter()
            .enumerate()
            .map(|(i, p)| rng::uniform(seed, i as u64) < p.value())
            .collect();
        Realization {
            present,
            scenario: None,
        }
    }

    /// Edges of `self` present in `realization`.
    pub fn realized_edges<'a>(
        &'a self,
        realization: &'a Realization,
    ) -> impl Iterator<Item = (u32, u32)> + 'a {
        debug_assert_eq!(realization.edge_count(), self.edge_count());
        self.edges
            .iter()
            .enumerate()
            .filter(move |(i, _)| realization.present(*i))
            .map(|(_, &e)| e)
    }
}

/// One concrete outcome of a stochastic graph: a membership flag per base
/// edge, plus the generating scenario when drawn from a correlated model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    present: Vec<bool>,
    scenario: Option<usize>,
}

impl Realization {
    pub fn new(present: Vec<bool>) -> Self {
        Realization {
            present,
            scenario: None,
        }
    }

    pub(crate) fn with_scenario(present: Vec<bool>, scenario: usize) -> Self {
        Realization {
            present,
            scenario: Some(scenario),
        }
    }

    pub fn from_mask(edge_count: usize, mask: u64) -> Self {
        debug_assert!(edge_count <= 64);
        Realization::new((0..edge_count).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn present(&self, edge_index: usize) -> bool {
        self.present[edge_index]
    }

    pub fn edge_count(&self) -> usize {
        self.present.len()
    }

    pub fn realized_count(&self) -> usize {
        self.present.iter().filter(|&&b| b).count()
    }

    /// Scenario index for realizations drawn from a correlated model.
    pub fn scenario(&self) -> Option<usize> {
        self.scenario
    }

    pub fn as_mask(&self) -> Option<u64> {
        if self.present.len() <= 64 {
            Some(
                self.present
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (i, &b)| m | (b as u64) << i),
            )
        } else {
            None
        }
    }
}

/// True iff every edge in `edges` has at least one endpoint in `cover`.
pub fn is_vertex_cover<I>(edges: I, cover: &VertexSet) -> bool
where
    I: IntoIterator<Item = (u32, u32)>,
{
    edges
        .into_iter()
        .all(|(u, v)| cover.contains(u) || cover.contains(v))
}
