//! Deterministic instance generators for experiments and tests.
//!
//! Everything here is a pure function of its arguments, so test corpora and
//! experiment sweeps are identical across runs and machines.

use crate::graph::{BaseGraph, Prob};
use crate::rng::SplitMix64;

/// Erdos-Renyi style base graph: each vertex pair becomes an edge with the
/// given density, every edge carrying the same existence probability.
pub fn erdos_renyi(n: usize, density: f64, edge_prob: Prob, seed: u64) -> BaseGraph {
    let mut rng = SplitMix64::new(seed);
    let mut weighted = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.next_f64() < density {
                weighted.push((u, v, edge_prob));
            }
        }
    }
    BaseGraph::build(n, &weighted).expect("generator emits valid edges")
}

/// Plain random graphs (unit probabilities) for oracle stress tests.
pub fn random_graphs(count: usize, max_n: usize, seed: u64) -> Vec<BaseGraph> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let n = 2 + rng.index(max_n - 1);
            let density = 0.15 + 0.6 * rng.next_f64();
            let mut weighted = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.next_f64() < density {
                        weighted.push((u, v, Prob::one()));
                    }
                }
            }
            BaseGraph::build(n, &weighted).expect("generator emits valid edges")
        })
        .collect()
}

const CORPUS_PROBS: [Prob; 3] = [Prob::ratio(3, 10), Prob::ratio(1, 2), Prob::ratio(1, 1)];

fn assign_probs(edges: &[(u32, u32)], pattern: usize) -> Vec<(u32, u32, Prob)> {
    edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| {
            let p = match pattern {
                0..=2 => CORPUS_PROBS[pattern],
                _ => CORPUS_PROBS[i % 3],
            };
            (u, v, p)
        })
        .collect()
}

/// The small-instance corpus: a few hundred deterministic graphs with at
/// most 8 vertices and 10 edges, probabilities drawn from {3/10, 1/2, 1}.
/// Structured shapes (paths, cycles, stars, matchings, cliques) under
/// several probability patterns, padded with seeded random graphs.
pub fn small_instance_corpus() -> Vec<BaseGraph> {
    let mut corpus = Vec::new();
    let mut push = |edges: Vec<(u32, u32)>, n: usize| {
        for pattern in 0..4 {
            let weighted = assign_probs(&edges, pattern);
            corpus.push(BaseGraph::build(n, &weighted).expect("valid shape"));
        }
    };

    for n in 2..=8usize {
        let path: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        push(path, n);
        if n >= 3 {
            let cycle: Vec<(u32, u32)> = (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
            push(cycle, n);
            let star: Vec<(u32, u32)> = (1..n as u32).map(|i| (0, i)).collect();
            push(star, n);
        }
        if n % 2 == 0 {
            let matching: Vec<(u32, u32)> = (0..n as u32 / 2).map(|i| (2 * i, 2 * i + 1)).collect();
            push(matching, n);
        }
        if (3..=5).contains(&n) {
            let mut clique = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    clique.push((u, v));
                }
            }
            push(clique, n);
        }
    }

    let mut rng = SplitMix64::new(0x5eed_c0de);
    while corpus.len() < 220 {
        let n = 4 + rng.index(5);
        let mut pairs = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                pairs.push((u, v));
            }
        }
        rng.shuffle(&mut pairs);
        let max_m = pairs.len().min(10);
        let m = 1 + rng.index(max_m);
        let weighted: Vec<(u32, u32, Prob)> = pairs[..m]
            .iter()
            .map(|&(u, v)| (u, v, CORPUS_PROBS[rng.index(3)]))
            .collect();
        corpus.push(BaseGraph::build(n, &weighted).expect("valid random instance"));
    }
    corpus
}
