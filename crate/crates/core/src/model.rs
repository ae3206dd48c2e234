//! A stochastic graph model: fully independent edges, or a mildly
//! correlated model with an explicit scenario space.

use crate::error::Result;
use crate::graph::{BaseGraph, Realization};
use crate::lowerbound::MildlyCorrelatedModel;
use crate::rng;

#[derive(Debug, Clone)]
pub enum Model {
    Independent(BaseGraph),
    Correlated(MildlyCorrelatedModel),
}

impl Model {
    pub fn base(&self) -> &BaseGraph {
        match self {
            Model::Independent(g) => g,
            Model::Correlated(m) => m.base(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.base().vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.base().edge_count()
    }

    pub fn is_correlated(&self) -> bool {
        matches!(self, Model::Correlated(_))
    }

    /// Draws one realization.
    pub fn sample(&self, seed: u64) -> Realization {
        match self {
            Model::Independent(g) => g.sample_realization(seed),
            Model::Correlated(m) => m.sample(seed),
        }
    }

    pub fn supports_conditional_completion(&self) -> bool {
        true
    }

    /// A full realization agreeing with `observed` on the `queried` edges,
    /// with everything else drawn from the model conditioned on those
    /// observations.
    pub fn complete_conditionally(
        &self,
        observed: &Realization,
        queried: &[usize],
        seed: u64,
    ) -> Result<Realization> {
        match self {
            Model::Independent(g) => {
                let queried_set: std::collections::HashSet<usize> =
                    queried.iter().copied().collect();
                let present = (0..g.edge_count())
                    .map(|i| {
                        if queried_set.contains(&i) {
                            observed.present(i)
                        } else {
                            rng::uniform(seed, i as u64) < g.prob(i).value()
                        }
                    })
                    .collect();
                Ok(Realization::new(present))
            }
            Model::Correlated(m) => m.complete_conditionally(observed, queried, seed),
        }
    }
}

impl From<BaseGraph> for Model {
    fn from(g: BaseGraph) -> Self {
        Model::Independent(g)
    }
}

impl From<MildlyCorrelatedModel> for Model {
    fn from(m: MildlyCorrelatedModel) -> Self {
        Model::Correlated(m)
    }
}
