//! Query-efficient vertex cover algorithms for stochastic graphs.
//!
//! A base graph is known, but each edge exists only with some probability;
//! the realized subgraph can be inspected through edge queries alone. The
//! algorithms here commit to a vertex set up front, query only the edges
//! that set leaves uncovered, and return the committed vertices together
//! with a cover of the realized queried edges — always a valid cover of
//! the realization, using far fewer queries than the full edge set.
//!
//! The crate provides:
//!
//! * [`graph`] — base graphs, seeded realizations, vertex sets;
//! * [`oracle`] — exact, greedy and brute-force vertex cover solvers with
//!   canonical tie-breaking;
//! * [`marginals`] — exact and sampled per-vertex cover probabilities;
//! * [`commit`] — the commit-then-query algorithms, threshold selection
//!   and the budget/cost ledger, plus exact evaluators;
//! * [`lowerbound`] — mildly correlated models and the planted-matching
//!   adversarial instance with its accounting;
//! * [`corpus`] — deterministic instance generators.

pub mod commit;
pub mod corpus;
mod enumerate;
pub mod error;
pub mod graph;
pub mod lowerbound;
pub mod marginals;
pub mod model;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{is_vertex_cover, BaseGraph, Prob, Realization, VertexSet};
pub use model::Model;
pub use oracle::{Cover, CoverOracle, OracleKind, SolverLimits, TieBreak};
