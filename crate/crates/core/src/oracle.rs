//! Minimum vertex cover oracles over realized graphs.
//!
//! Three oracle kinds are provided: an exact branch-and-bound solver with
//! reduction rules, a greedy maximal-matching 2-approximation, and an
//! exhaustive brute-force solver used to certify the exact one. In canonical
//! mode every oracle is a pure function of its input edge set; the canonical
//! exact and brute-force oracles return the minimum cover that is smallest
//! under subset-size-then-lexicographic order. Seeded-random mode relabels
//! the instance (or shuffles the greedy edge order) from caller-supplied
//! entropy.

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Exact,
    Greedy2,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Deterministic: lexicographically smallest optimal cover.
    Canonical,
    /// Randomized by caller entropy mixed with `salt`.
    SeededRandom { salt: u64 },
}

/// Size limits for the exact solver; configuration rather than constants so
/// a harness can trade time for size.
#[derive(Debug, Clone, Copy)]
pub struct SolverLimits {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_vertices: 64,
            max_edges: 256,
        }
    }
}

/// Upper bound on vertex count for the brute-force oracle.
pub const BRUTEFORCE_MAX_VERTICES: usize = 22;

/// A vertex cover of some realized edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    vertices: VertexSet,
}

impl Cover {
    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn into_vertices(self) -> VertexSet {
        self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// A minimum-vertex-cover function over realized graphs, with a declared
/// approximation factor and a tie-breaking mode.
#[derive(Debug, Clone, Copy)]
pub struct CoverOracle {
    kind: OracleKind,
    tie_break: TieBreak,
    limits: SolverLimits,
}

impl CoverOracle {
    pub fn exact() -> Self {
        CoverOracle {
            kind: OracleKind::Exact,
            tie_break: TieBreak::Canonical,
            limits: SolverLimits::default(),
        }
    }

    pub fn greedy2() -> Self {
        CoverOracle {
            kind: OracleKind::Greedy2,
            tie_break: TieBreak::Canonical,
            limits: SolverLimits::default(),
        }
    }

    pub fn bruteforce() -> Self {
        CoverOracle {
            kind: OracleKind::Bruteforce,
            tie_break: TieBreak::Canonical,
            limits: SolverLimits::default(),
        }
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_limits(mut self, limits: SolverLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    /// Declared approximation factor: 1 for exact and brute force, 2 for
    /// the greedy oracle.
    pub fn alpha(&self) -> f64 {
        match self.kind {
            OracleKind::Greedy2 => 2.0,
            _ => 1.0,
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.tie_break, TieBreak::Canonical)
    }

    /// Cover of the given realized edge set over vertices `[0, n)`.
    ///
    /// `entropy` feeds the seeded-random mode and is ignored in canonical
    /// mode, so canonical calls are pure functions of `(n, edges)`.
    pub fn cover(&self, n: usize, edges: &[(u32, u32)], entropy: u64) -> Result<Cover> {
        match self.tie_break {
            TieBreak::Canonical => self.cover_canonical(n, edges),
            TieBreak::SeededRandom { salt } => {
                let mut rng = SplitMix64::new(salt ^ entropy.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                match self.kind {
                    OracleKind::Greedy2 => {
                        let mut order: Vec<usize> = (0..edges.len()).collect();
                        rng.shuffle(&mut order);
                        Ok(greedy_cover_ordered(n, edges, &order))
                    }
                    _ => {
                        // Random relabeling, canonical solve, map back.
                        let mut perm: Vec<u32> = (0..n as u32).collect();
                        rng.shuffle(&mut perm);
                        let relabeled: Vec<(u32, u32)> = edges
                            .iter()
                            .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
                            .collect();
                        let cover = self.cover_canonical(n, &relabeled)?;
                        let mut inverse = vec![0u32; n];
                        for (orig, &img) in perm.iter().enumerate() {
                            inverse[img as usize] = orig as u32;
                        }
                        let mapped: Vec<u32> = cover
                            .vertices()
                            .iter()
                            .map(|v| inverse[v as usize])
                            .collect();
                        Ok(Cover {
                            vertices: VertexSet::from_indices(n, &mapped),
                        })
                    }
                }
            }
        }
    }

    fn cover_canonical(&self, n: usize, edges: &[(u32, u32)]) -> Result<Cover> {
        match self.kind {
            OracleKind::Greedy2 => {
                let order: Vec<usize> = (0..edges.len()).collect();
                Ok(greedy_cover_ordered(n, edges, &order))
            }
            OracleKind::Bruteforce => {
                if n > BRUTEFORCE_MAX_VERTICES {
                    return Err(Error::InstanceTooLarge {
                        what: "vertices (brute force)",
                        actual: n,
                        limit: BRUTEFORCE_MAX_VERTICES,
                    });
                }
                Ok(bruteforce_cover(n, edges))
            }
            OracleKind::Exact => {
                if n > self.limits.max_vertices {
                    return Err(Error::InstanceTooLarge {
                        what: "vertices (exact solver)",
                        actual: n,
                        limit: self.limits.max_vertices,
                    });
                }
                if edges.len() > self.limits.max_edges {
                    return Err(Error::InstanceTooLarge {
                        what: "edges (exact solver)",
                        actual: edges.len(),
                        limit: self.limits.max_edges,
                    });
                }
                Ok(exact_cover_canonical(n, edges))
            }
        }
    }
}

/// Greedy maximal matching in the given edge order; both endpoints of every
/// matched edge form a cover of size at most twice the optimum.
fn greedy_cover_ordered(n: usize, edges: &[(u32, u32)], order: &[usize]) -> Cover {
    let mut matched = VertexSet::empty(n);
    for &i in order {
        let (u, v) = edges[i];
        if !matched.contains(u) && !matched.contains(v) {
            matched.insert(u);
            matched.insert(v);
        }
    }
    Cover { vertices: matched }
}

/// Adjacency as block bitsets; supports any `n`.
struct Adjacency {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Adjacency {
    fn new(n: usize, edges: &[(u32, u32)]) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        for &(u, v) in edges {
            rows[u as usize * words + v as usize / 64] |= 1 << (v % 64);
            rows[v as usize * words + u as usize / 64] |= 1 << (u % 64);
        }
        Adjacency { n, words, rows }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

#[derive(Clone)]
struct Blocks(Vec<u64>);

impl Blocks {
    fn empty(words: usize) -> Self {
        Blocks(vec![0; words])
    }

    fn full(words: usize, n: usize) -> Self {
        let mut b = vec![u64::MAX; words];
        let tail = n % 64;
        if tail != 0 {
            b[words - 1] = (1u64 << tail) - 1;
        }
        if n == 0 {
            b.fill(0);
        }
        Blocks(b)
    }

    fn get(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn set(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn clear(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn count_and(&self, other: &[u64]) -> usize {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn iter_and<'a>(&'a self, other: &'a [u64]) -> impl Iterator<Item = usize> + 'a {
        self.0
            .iter()
            .zip(other)
            .enumerate()
            .flat_map(|(w, (a, b))| {
                let mut bits = a & b;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        None
                    } else {
                        let tz = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        Some(w * 64 + tz)
                    }
                })
            })
    }

    fn subset_of(&self, other: &[u64]) -> bool {
        self.0.iter().zip(other).all(|(a, b)| a & !b == 0)
    }
}

/// Branch-and-bound state for the minimum-size phase.
struct SizeSolver<'a> {
    adj: &'a Adjacency,
    best: usize,
}

impl<'a> SizeSolver<'a> {
    /// Minimum cover size of the subgraph induced by `alive`, where vertices
    /// in `excluded` may not join the cover. Search is pruned against
    /// `self.best`; `None` means no cover smaller than `self.best` exists
    /// (or `excluded` makes the instance infeasible).
    fn solve(&mut self, alive: Blocks, excluded: Blocks, chosen: usize) -> Option<usize> {
        let mut alive = alive;
        let mut chosen = chosen;

        // Reductions run to a fixed point.
        loop {
            if chosen >= self.best {
                return None;
            }
            let mut changed = false;

            // Excluded vertices force every alive neighbor into the cover.
            for v in 0..self.adj.n {
                if alive.get(v) && excluded.get(v) {
                    let neighbors: Vec<usize> = alive.iter_and(self.adj.row(v)).collect();
                    if neighbors.iter().any(|&u| excluded.get(u)) {
                        return None; // an edge between two excluded vertices
                    }
                    for u in neighbors {
                        alive.clear(u);
                        chosen += 1;
                    }
                    alive.clear(v);
                    changed = true;
                }
            }
            if changed {
                continue;
            }

            // Isolated vertices leave; degree-1 vertices force the neighbor;
            // dominated vertices (N[v] within N[u] of a neighbor u) force u.
            for v in 0..self.adj.n {
                if !alive.get(v) {
                    continue;
                }
                let deg = alive.count_and(self.adj.row(v));
                if deg == 0 {
                    alive.clear(v);
                    changed = true;
                } else if deg == 1 {
                    let u = alive.iter_and(self.adj.row(v)).next().unwrap();
                    alive.clear(u);
                    alive.clear(v);
                    chosen += 1;
                    changed = true;
                    break;
                }
            }
            if changed {
                continue;
            }

            for v in 0..self.adj.n {
                if !alive.get(v) {
                    continue;
                }
                let mut forced = None;
                for u in alive.iter_and(self.adj.row(v)) {
                    // v's alive neighborhood minus u inside u's neighborhood.
                    let mut nv = Blocks(
                        self.adj
                            .row(v)
                            .iter()
                            .zip(&alive.0)
                            .map(|(a, b)| a & b)
                            .collect(),
                    );
                    nv.clear(u);
                    if nv.subset_of(self.adj.row(u)) {
                        forced = Some(u);
                        break;
                    }
                }
                if let Some(u) = forced {
                    alive.clear(u);
                    chosen += 1;
                    changed = true;
                    break;
                }
            }
            if !changed {
                break;
            }
        }

        // Lower bound from a greedily built maximal matching.
        let mut lb = 0usize;
        {
            let mut avail = alive.clone();
            for v in 0..self.adj.n {
                if avail.get(v) {
                    let partner = avail.iter_and(self.adj.row(v)).find(|&u| u != v);
                    if let Some(u) = partner {
                        avail.clear(v);
                        avail.clear(u);
                        lb += 1;
                    }
                }
            }
            if lb == 0 {
                // No edges left: solved.
                if chosen < self.best {
                    self.best = chosen;
                }
                return Some(chosen);
            }
        }
        if chosen + lb >= self.best {
            return None;
        }

        // Branch on a maximum-degree vertex.
        let branch = (0..self.adj.n)
            .filter(|&v| alive.get(v))
            .max_by_key(|&v| alive.count_and(self.adj.row(v)))
            .unwrap();

        // Take it...
        let mut take_alive = alive.clone();
        take_alive.clear(branch);
        let took = self.solve(take_alive, excluded.clone(), chosen + 1);

        // ...or exclude it, forcing its neighborhood.
        let mut skip_excluded = excluded.clone();
        skip_excluded.set(branch);
        let skipped = self.solve(alive, skip_excluded, chosen);

        match (took, skipped) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        }
    }
}

fn min_cover_size(adj: &Adjacency, excluded: &Blocks, cap: usize) -> Option<usize> {
    let mut solver = SizeSolver { adj, best: cap + 1 };
    solver.solve(Blocks::full(adj.words, adj.n), excluded.clone(), 0)
}

/// Exact canonical cover: minimum size via branch and bound, then the
/// lexicographically smallest optimal cover reconstructed vertex by vertex.
fn exact_cover_canonical(n: usize, edges: &[(u32, u32)]) -> Cover {
    let adj = Adjacency::new(n, edges);
    let k = min_cover_size(&adj, &Blocks::empty(adj.words), n).expect("full vertex set covers");

    let mut chosen: Vec<u32> = Vec::with_capacity(k);
    let mut excluded = Blocks::empty(adj.words);
    let mut taken = Blocks::empty(adj.words);
    for v in 0..n {
        if chosen.len() == k {
            break;
        }
        // Try including v: feasible iff some size-k cover extends the
        // current prefix with v.
        let mut trial_taken = taken.clone();
        trial_taken.set(v);
        let residual = residual_min_size(&adj, &trial_taken, &excluded, k - chosen.len() - 1);
        if residual.is_some() {
            chosen.push(v as u32);
            taken = trial_taken;
        } else {
            excluded.set(v);
        }
    }
    debug_assert_eq!(chosen.len(), k);
    Cover {
        vertices: VertexSet::from_indices(n, &chosen),
    }
}

/// Minimum cover size of the graph with `taken` already in the cover and
/// `excluded` barred from it, if it is at most `cap`.
fn residual_min_size(
    adj: &Adjacency,
    taken: &Blocks,
    excluded: &Blocks,
    cap: usize,
) -> Option<usize> {
    let mut alive = Blocks::full(adj.words, adj.n);
    for v in 0..adj.n {
        if taken.get(v) {
            alive.clear(v);
        }
    }
    let mut solver = SizeSolver { adj, best: cap + 1 };
    solver.solve(alive, excluded.clone(), 0)
}

/// Exhaustive search in subset-size-then-lexicographic order; the first
/// cover found is the canonical one.
fn bruteforce_cover(n: usize, edges: &[(u32, u32)]) -> Cover {
    if edges.is_empty() {
        return Cover {
            vertices: VertexSet::empty(n),
        };
    }
    for size in 0..=n {
        let mut combo: Vec<u32> = (0..size as u32).collect();
        loop {
            let candidate = VertexSet::from_indices(n, &combo);
            if is_cover(edges, &candidate) {
                return Cover {
                    vertices: candidate,
                };
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("the full vertex set is always a cover");
}

fn is_cover(edges: &[(u32, u32)], s: &VertexSet) -> bool {
    edges.iter().all(|&(u, v)| s.contains(u) || s.contains(v))
}

/// Advances `combo` to the next k-combination of `[0, n)` in lexicographic
/// order; false when exhausted.
fn next_combination(combo: &mut [u32], n: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < (n - k + i) as u32 {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
