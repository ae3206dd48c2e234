//! Mildly correlated stochastic models and the Ruzsa-Szemeredi adversarial
//! construction with exact lower-bound accounting.
//!
//! A mildly correlated model splits the edge set into an independent block
//! `E1` and a small correlated block `E2` (at most `correlation_budget * n`
//! edges) whose joint outcome is drawn from an explicit finite scenario
//! list. The adversarial instance plants one induced matching `M*` of an
//! RS graph and realizes the exterior edge of every RS vertex that `M*`
//! leaves uncovered; a non-adaptive querier must then pay for almost all of
//! `M*` even though only its realized edges need covering.

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Prob, Realization};
use crate::rng::{self, SplitMix64};

/// Default bound on `|E2| / n` accepted when building correlated models.
pub const DEFAULT_CORRELATION_BUDGET: f64 = 2.0;

/// A bipartite graph on `2 * side` vertices whose edge set is partitioned
/// into induced matchings. Edge endpoints are `(left, right)`, both in
/// `[0, side)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsGraph {
    side: usize,
    edges: Vec<(u32, u32)>,
    matchings: Vec<Vec<usize>>,
}

impl RsGraph {
    pub fn new(side: usize, edges: Vec<(u32, u32)>, matchings: Vec<Vec<usize>>) -> Self {
        RsGraph {
            side,
            edges,
            matchings,
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn matchings(&self) -> &[Vec<usize>] {
        &self.matchings
    }

    /// Matching size `r` when uniform.
    pub fn matching_size(&self) -> Option<usize> {
        let r = self.matchings.first()?.len();
        self.matchings.iter().all(|m| m.len() == r).then_some(r)
    }
}

/// Outcome of structural validation; violations are data, not faults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RsValidation {
    Ok { r: usize, t: usize },
    Violation(RsViolation),
}

impl RsValidation {
    pub fn is_ok(&self) -> bool {
        matches!(self, RsValidation::Ok { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsViolation {
    pub kind: RsViolationKind,
    pub detail: String,
    /// Edge indices witnessing the violation.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsViolationKind {
    BadEndpoint,
    NotAMatching,
    WrongSize,
    NotInduced,
    NotAPartition,
}

/// Checks that the claimed matchings are matchings of one common size, are
/// induced (no graph edge other than a matching's own joins two vertices it
/// covers), and partition the edge list. Reports the first violation found.
pub fn validate_rs_graph(rs: &RsGraph) -> RsValidation {
    let side = rs.side;
    for (i, &(l, r)) in rs.edges.iter().enumerate() {
        if l as usize >= side || r as usize >= side {
            return RsValidation::Violation(RsViolation {
                kind: RsViolationKind::BadEndpoint,
                detail: format!("edge {i} = ({l}, {r}) leaves side range [0, {side})"),
                witness: vec![i],
            });
        }
    }

    let r_expected = rs.matchings.first().map_or(0, |m| m.len());
    for (mi, matching) in rs.matchings.iter().enumerate() {
        if matching.len() != r_expected {
            return RsValidation::Violation(RsViolation {
                kind: RsViolationKind::WrongSize,
                detail: format!(
                    "matching {mi} has size {} but expected {r_expected}",
                    matching.len()
                ),
                witness: matching.clone(),
            });
        }
        let mut left_seen = vec![false; side];
        let mut right_seen = vec![false; side];
        for &ei in matching {
            if ei >= rs.edges.len() {
                return RsValidation::Violation(RsViolation {
                    kind: RsViolationKind::NotAPartition,
                    detail: format!("matching {mi} references missing edge {ei}"),
                    witness: vec![ei],
                });
            }
            let (l, r) = rs.edges[ei];
            if left_seen[l as usize] || right_seen[r as usize] {
                return RsValidation::Violation(RsViolation {
                    kind: RsViolationKind::NotAMatching,
                    detail: format!("matching {mi} repeats an endpoint at edge {ei}"),
                    witness: matching.clone(),
                });
            }
            left_seen[l as usize] = true;
            right_seen[r as usize] = true;
        }
        // Induced: any edge between covered vertices must belong to the
        // matching itself.
        for (ei, &(l, r)) in rs.edges.iter().enumerate() {
            if left_seen[l as usize] && right_seen[r as usize] && !matching.contains(&ei) {
                return RsValidation::Violation(RsViolation {
                    kind: RsViolationKind::NotInduced,
                    detail: format!("edge {ei} joins two vertices covered by matching {mi}"),
                    witness: vec![ei],
                });
            }
        }
    }

    let mut assigned = vec![0usize; rs.edges.len()];
    for matching in &rs.matchings {
        for &ei in matching {
            assigned[ei] += 1;
        }
    }
    if let Some(ei) = assigned.iter().position(|&c| c != 1) {
        return RsValidation::Violation(RsViolation {
            kind: RsViolationKind::NotAPartition,
            detail: format!("edge {ei} appears in {} matchings", assigned[ei]),
            witness: vec![ei],
        });
    }

    RsValidation::Ok {
        r: r_expected,
        t: rs.matchings.len(),
    }
}

/// The 6-cycle exemplar: side 3, three induced matchings of size 2.
pub fn six_cycle_rs() -> RsGraph {
    let edges = vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)];
    let matchings = vec![vec![0, 3], vec![2, 5], vec![4, 1]];
    let rs = RsGraph::new(3, edges, matchings);
    debug_assert!(validate_rs_graph(&rs).is_ok());
    rs
}

/// Trivial construction from pairwise vertex-disjoint matchings; valid
/// whenever `r * t <= side`.
pub fn disjoint_matchings_rs(side: usize, r: usize, t: usize) -> Result<RsGraph> {
    if r * t > side {
        return Err(Error::ParameterOutOfRange(format!(
            "disjoint construction needs r*t <= side, got {r}*{t} > {side}"
        )));
    }
    let mut edges = Vec::with_capacity(r * t);
    let mut matchings = Vec::with_capacity(t);
    for j in 0..t {
        let mut matching = Vec::with_capacity(r);
        for i in 0..r {
            let v = (j * r + i) as u32;
            matching.push(edges.len());
            edges.push((v, v));
        }
        matchings.push(matching);
    }
    Ok(RsGraph::new(side, edges, matchings))
}

/// Randomized search for a small `(r, t)` RS graph: draws `t` random
/// matchings of size `r` and keeps the first draw that validates.
pub fn search_rs_graph(
    side: usize,
    r: usize,
    t: usize,
    seed: u64,
    attempts: usize,
) -> Option<RsGraph> {
    if r > side {
        return None;
    }
    let mut rng = SplitMix64::new(seed);
    for _ in 0..attempts {
        let mut edges = Vec::with_capacity(r * t);
        let mut matchings = Vec::with_capacity(t);
        let mut seen = std::collections::HashSet::new();
        let mut clash = false;
        for _ in 0..t {
            let mut left: Vec<u32> = (0..side as u32).collect();
            let mut right: Vec<u32> = (0..side as u32).collect();
            rng.shuffle(&mut left);
            rng.shuffle(&mut right);
            let mut matching = Vec::with_capacity(r);
            for i in 0..r {
                let e = (left[i], right[i]);
                if !seen.insert(e) {
                    clash = true;
                    break;
                }
                matching.push(edges.len());
                edges.push(e);
            }
            if clash {
                break;
            }
            matchings.push(matching);
        }
        if clash {
            continue;
        }
        let candidate = RsGraph::new(side, edges, matchings);
        if validate_rs_graph(&candidate).is_ok() {
            return Some(candidate);
        }
    }
    None
}

/// One joint outcome of the correlated block: the set of realized `E2`
/// edges (base-graph indices) and its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    realized: Vec<usize>,
    prob: Prob,
}

impl Scenario {
    pub fn new(mut realized: Vec<usize>, prob: Prob) -> Self {
        realized.sort_unstable();
        Scenario { realized, prob }
    }

    pub fn realized(&self) -> &[usize] {
        &self.realized
    }

    pub fn prob(&self) -> Prob {
        self.prob
    }

    pub fn realizes(&self, edge_index: usize) -> bool {
        self.realized.binary_search(&edge_index).is_ok()
    }
}

/// A stochastic graph whose edges split into an independent block `E1` and
/// a small correlated block `E2` governed by a finite scenario list.
///
/// `E1` edges are sampled mutually independently (with the base-graph
/// probabilities) and independently of the scenario choice.
#[derive(Debug, Clone, PartialEq)]
pub struct MildlyCorrelatedModel {
    base: BaseGraph,
    e2: Vec<usize>,
    scenarios: Vec<Scenario>,
}

impl MildlyCorrelatedModel {
    pub fn new(base: BaseGraph, e2: Vec<usize>, scenarios: Vec<Scenario>) -> Result<Self> {
        Self::with_budget(base, e2, scenarios, DEFAULT_CORRELATION_BUDGET)
    }

    pub fn with_budget(
        base: BaseGraph,
        mut e2: Vec<usize>,
        scenarios: Vec<Scenario>,
        correlation_budget: f64,
    ) -> Result<Self> {
        e2.sort_unstable();
        e2.dedup();
        if e2.iter().any(|&i| i >= base.edge_count()) {
            return Err(Error::ParameterOutOfRange(
                "E2 references an edge outside the base graph".into(),
            ));
        }
        if e2.len() as f64 > correlation_budget * base.vertex_count() as f64 {
            return Err(Error::ParameterOutOfRange(format!(
                "|E2| = {} exceeds correlation budget {correlation_budget} * n = {}",
                e2.len(),
                correlation_budget * base.vertex_count() as f64
            )));
        }
        if scenarios.is_empty() {
            return Err(Error::ParameterOutOfRange(
                "correlated model needs at least one scenario".into(),
            ));
        }
        let total: f64 = scenarios.iter().map(|s| s.prob.value()).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ParameterOutOfRange(format!(
                "scenario probabilities sum to {total}, expected 1"
            )));
        }
        for s in &scenarios {
            if s.realized.iter().any(|i| e2.binary_search(i).is_err()) {
                return Err(Error::ParameterOutOfRange(
                    "scenario realizes an edge outside E2".into(),
                ));
            }
        }
        Ok(MildlyCorrelatedModel {
            base,
            e2,
            scenarios,
        })
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn e2_indices(&self) -> &[usize] {
        &self.e2
    }

    pub fn e1_indices(&self) -> Vec<usize> {
        (0..self.base.edge_count())
            .filter(|i| self.e2.binary_search(i).is_err())
            .collect()
    }

    pub fn is_correlated_edge(&self, edge_index: usize) -> bool {
        self.e2.binary_search(&edge_index).is_ok()
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    /// Draws a scenario and independent `E1` flags. The scenario index is
    /// recorded on the realization.
    pub fn sample(&self, seed: u64) -> Realization {
        let scenario = self.draw_scenario(rng::derive(seed, SCENARIO_STREAM));
        self.realize_with_scenario(scenario, seed)
    }

    fn draw_scenario(&self, seed: u64) -> usize {
        let u = rng::uniform(seed, 0);
        let mut acc = 0.0;
        for (i, s) in self.scenarios.iter().enumerate() {
            acc += s.prob.value();
            if u < acc {
                return i;
            }
        }
        self.scenarios.len() - 1
    }

    fn realize_with_scenario(&self, scenario: usize, seed: u64) -> Realization {
        let chosen = &self.scenarios[scenario];
        let present = (0..self.base.edge_count())
            .map(|i| {
                if self.is_correlated_edge(i) {
                    chosen.realizes(i)
                } else {
                    rng::uniform(seed, i as u64) < self.base.prob(i).value()
                }
            })
            .collect();
        Realization::with_scenario(present, scenario)
    }

    /// Scenario indices consistent with the observed flags on the queried
    /// edges (only `E2` observations constrain the scenario).
    pub fn consistent_scenarios(&self, observed: &Realization, queried: &[usize]) -> Vec<usize> {
        (0..self.scenarios.len())
            .filter(|&s| {
                queried.iter().all(|&q| {
                    !self.is_correlated_edge(q)
                        || self.scenarios[s].realizes(q) == observed.present(q)
                })
            })
            .collect()
    }

    /// Full realization agreeing with `observed` on `queried`: a consistent
    /// scenario is drawn with renormalized probability, unqueried `E1`
    /// edges are sampled fresh.
    pub fn complete_conditionally(
        &self,
        observed: &Realization,
        queried: &[usize],
        seed: u64,
    ) -> Result<Realization> {
        let consistent = self.consistent_scenarios(observed, queried);
        if consistent.is_empty() {
            return Err(Error::ScenarioUnknown);
        }
        let total: f64 = consistent
            .iter()
            .map(|&s| self.scenarios[s].prob.value())
            .sum();
        let u = rng::uniform(rng::derive(seed, SCENARIO_STREAM), 0) * total;
        let mut acc = 0.0;
        let mut chosen = *consistent.last().unwrap();
        for &s in &consistent {
            acc += self.scenarios[s].prob.value();
            if u < acc {
                chosen = s;
                break;
            }
        }
        let queried_set: std::collections::HashSet<usize> = queried.iter().copied().collect();
        let scenario = &self.scenarios[chosen];
        let present = (0..self.base.edge_count())
            .map(|i| {
                if queried_set.contains(&i) {
                    observed.present(i)
                } else if self.is_correlated_edge(i) {
                    scenario.realizes(i)
                } else {
                    rng::uniform(seed, i as u64) < self.base.prob(i).value()
                }
            })
            .collect();
        Ok(Realization::with_scenario(present, chosen))
    }
}

const SCENARIO_STREAM: u64 = 0x5ce7a410;

/// The planted-matching adversarial instance: an RS graph realized
/// independently at probability `eps2`, one exterior vertex and edge per RS
/// vertex, and a uniformly drawn matching `M*` whose uncovered RS vertices
/// have their exterior edges realized.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    rs: RsGraph,
    eps2: Prob,
    model: MildlyCorrelatedModel,
    /// Base-graph edge indices of each induced matching.
    matchings: Vec<Vec<usize>>,
    /// Base-graph edge index of the exterior edge of each RS vertex.
    exterior: Vec<usize>,
}

/// Builds the adversarial instance for a validated RS graph.
///
/// Vertex layout of the augmented base graph on `4 * side` vertices: RS
/// left vertex `i` is `i`, RS right vertex `j` is `side + j`, the exterior
/// partner of RS vertex `w` is `2 * side + w`.
pub fn build_lowerbound_instance(rs: &RsGraph, eps2: Prob) -> Result<LowerBoundInstance> {
    match validate_rs_graph(rs) {
        RsValidation::Ok { .. } => {}
        RsValidation::Violation(v) => return Err(Error::InvalidRsGraph(v.detail)),
    }
    if eps2.value() <= 0.0 || eps2.value() > 1.0 {
        return Err(Error::ParameterOutOfRange(format!(
            "eps2 = {} outside (0, 1]",
            eps2.value()
        )));
    }
    let side = rs.side();
    let n = 4 * side;
    let mut weighted: Vec<(u32, u32, Prob)> = Vec::new();
    for &(l, r) in rs.edges() {
        weighted.push((l, side as u32 + r, eps2));
    }
    for w in 0..2 * side as u32 {
        weighted.push((w, 2 * side as u32 + w, Prob::one()));
    }
    let base = BaseGraph::build(n, &weighted)?;

    let rs_edge_index: Vec<usize> = rs
        .edges()
        .iter()
        .map(|&(l, r)| base.edge_index(l, side as u32 + r).expect("edge was added"))
        .collect();
    let exterior: Vec<usize> = (0..2 * side as u32)
        .map(|w| {
            base.edge_index(w, 2 * side as u32 + w)
                .expect("edge was added")
        })
        .collect();

    let matchings: Vec<Vec<usize>> = rs
        .matchings()
        .iter()
        .map(|m| m.iter().map(|&ei| rs_edge_index[ei]).collect())
        .collect();

    let t = matchings.len();
    let scenarios: Vec<Scenario> = rs
        .matchings()
        .iter()
        .map(|matching| {
            let mut covered = vec![false; 2 * side];
            for &ei in matching {
                let (l, r) = rs.edges()[ei];
                covered[l as usize] = true;
                covered[side + r as usize] = true;
            }
            let realized: Vec<usize> = (0..2 * side)
                .filter(|&w| !covered[w])
                .map(|w| exterior[w])
                .collect();
            Scenario::new(realized, Prob::ratio(1, t as u64))
        })
        .collect();

    let model = MildlyCorrelatedModel::new(base, exterior.clone(), scenarios)?;
    Ok(LowerBoundInstance {
        rs: rs.clone(),
        eps2,
        model,
        matchings,
        exterior,
    })
}

impl LowerBoundInstance {
    pub fn model(&self) -> &MildlyCorrelatedModel {
        &self.model
    }

    pub fn base(&self) -> &BaseGraph {
        self.model.base()
    }

    pub fn rs(&self) -> &RsGraph {
        &self.rs
    }

    pub fn eps2(&self) -> Prob {
        self.eps2
    }

    pub fn side(&self) -> usize {
        self.rs.side()
    }

    pub fn matching_size(&self) -> usize {
        self.rs.matching_size().expect("validated uniform size")
    }

    /// Base-edge indices of each planted-matching candidate.
    pub fn matchings(&self) -> &[Vec<usize>] {
        &self.matchings
    }

    pub fn exterior_edges(&self) -> &[usize] {
        &self.exterior
    }

    /// Exact optimum of a realization whose scenario is known:
    /// `2 * (side - r)` forced exterior covers plus one vertex per realized
    /// `M*` edge. Equals the brute-force minimum vertex cover.
    pub fn exact_opt_lb(&self, realization: &Realization) -> Result<usize> {
        let scenario = realization.scenario().ok_or(Error::ScenarioUnknown)?;
        if scenario >= self.matchings.len() {
            return Err(Error::ScenarioUnknown);
        }
        let realized_mstar = self.matchings[scenario]
            .iter()
            .filter(|&&ei| realization.present(ei))
            .count();
        Ok(2 * (self.side() - self.matching_size()) + realized_mstar)
    }

    /// Expected size of the cover a non-adaptive query set `q` forces: per
    /// scenario, every unqueried `M*` edge must be covered outright while a
    /// queried one costs only its realization probability, on top of the
    /// `2 * (side - r)` exterior obligations.
    pub fn nonadaptive_forced_cover(&self, q: &[usize]) -> f64 {
        let queried: std::collections::HashSet<usize> = q.iter().copied().collect();
        let fixed = 2 * (self.side() - self.matching_size());
        self.matchings
            .iter()
            .zip(self.model.scenarios())
            .map(|(matching, scenario)| {
                let in_q = matching.iter().filter(|ei| queried.contains(ei)).count();
                let out_q = matching.len() - in_q;
                scenario.prob().value()
                    * (fixed as f64 + out_q as f64 + self.eps2.value() * in_q as f64)
            })
            .sum()
    }

    /// Expected optimum: `2 * (side - r) + eps2 * r`.
    pub fn expected_opt(&self) -> f64 {
        2.0 * (self.side() - self.matching_size()) as f64
            + self.eps2.value() * self.matching_size() as f64
    }
}

/// A family of vertex-disjoint copies of one instance with independent
/// scenarios; accounting extends additively. Global edge index
/// `copy * stride + local` addresses edge `local` of copy `copy`, where
/// `stride` is the per-copy edge count.
#[derive(Debug, Clone)]
pub struct LowerBoundFamily {
    proto: LowerBoundInstance,
    copies: usize,
}

/// `k` vertex-disjoint copies of the instance.
pub fn replicate_instance(
    instance: &LowerBoundInstance,
    copies: usize,
) -> Result<LowerBoundFamily> {
    if copies == 0 {
        return Err(Error::ParameterOutOfRange("copies must be >= 1".into()));
    }
    Ok(LowerBoundFamily {
        proto: instance.clone(),
        copies,
    })
}

impl LowerBoundFamily {
    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn instance(&self) -> &LowerBoundInstance {
        &self.proto
    }

    pub fn edge_stride(&self) -> usize {
        self.proto.base().edge_count()
    }

    pub fn edge_count(&self) -> usize {
        self.copies * self.edge_stride()
    }

    pub fn nonadaptive_forced_cover(&self, q: &[usize]) -> f64 {
        let stride = self.edge_stride();
        let mut per_copy: Vec<Vec<usize>> = vec![Vec::new(); self.copies];
        for &g in q {
            let copy = g / stride;
            if copy < self.copies {
                per_copy[copy].push(g % stride);
            }
        }
        per_copy
            .iter()
            .map(|local| self.proto.nonadaptive_forced_cover(local))
            .sum()
    }

    pub fn expected_opt(&self) -> f64 {
        self.copies as f64 * self.proto.expected_opt()
    }

    /// Query set of the given size under the counting-rule allocation.
    ///
    /// Exterior edges are taken first: querying them reveals the planted
    /// matching but never removes an obligation from the forced-cover
    /// accounting, which is how the counting argument treats a non-adaptive
    /// budget. Any remainder spills into matching edges round-robin across
    /// matchings, the spread that the pigeonhole step assumes.
    pub fn counting_rule_budget(&self, budget: usize) -> Vec<usize> {
        let stride = self.edge_stride();
        let mut q = Vec::with_capacity(budget);
        'outer: for copy in 0..self.copies {
            for &ext in self.proto.exterior_edges() {
                if q.len() == budget {
                    break 'outer;
                }
                q.push(copy * stride + ext);
            }
        }
        if q.len() < budget {
            let matchings = self.proto.matchings();
            let r = self.proto.matching_size();
            'spill: for round in 0..r {
                for copy in 0..self.copies {
                    for matching in matchings {
                        if q.len() == budget {
                            break 'spill;
                        }
                        q.push(copy * stride + matching[round]);
                    }
                }
            }
        }
        q.truncate(budget);
        q
    }
}
