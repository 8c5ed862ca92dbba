use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::Component;
use crate::objectives::Objective;

#[derive(Clone, Debug)]
enum Sampling {
    Uniform,
    Weighted {
        probs: Vec<f64>,
        index: WeightedIndex<f64>,
    },
}

/// What one agent privately knows: its objective, its constraint components
/// and the distribution it draws component indices from.
#[derive(Clone, Debug)]
pub struct AgentSpec {
    objective: Objective,
    components: Vec<Component>,
    sampling: Sampling,
}

impl AgentSpec {
    /// Uniform sampling over `components`.
    pub fn new(objective: Objective, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidConfig("agent has no constraint components".into()));
        }
        for c in &components {
            ensure_dim(objective.dim(), c.dim())?;
        }
        Ok(AgentSpec {
            objective,
            components,
            sampling: Sampling::Uniform,
        })
    }

    /// Replaces uniform sampling with `probs`, which must be strictly positive and sum to one.
    pub fn with_sampling(mut self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.components.len() {
            return Err(Error::InvalidConfig(format!(
                "{} probabilities for {} components",
                probs.len(),
                self.components.len()
            )));
        }
        if probs.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::InvalidConfig(
                "sampling probabilities must be strictly positive".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "sampling probabilities sum to {total}, expected 1"
            )));
        }
        let index = WeightedIndex::new(&probs)
            .map_err(|e| Error::InvalidConfig(format!("sampling distribution: {e}")))?;
        self.sampling = Sampling::Weighted { probs, index };
        Ok(self)
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, index: usize) -> Result<&Component> {
        self.components.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.components.len(),
        })
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Probability of drawing each component.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.sampling {
            Sampling::Uniform => vec![1.0 / self.components.len() as f64; self.components.len()],
            Sampling::Weighted { probs, .. } => probs.clone(),
        }
    }
}

/// Draws the index of the component an agent projects onto.
pub fn sample_component<R: Rng + ?Sized>(agent: &AgentSpec, rng: &mut R) -> usize {
    let n = agent.components.len();
    if n == 1 {
        return 0;
    }
    match &agent.sampling {
        Sampling::Uniform => rng.random_range(0..n),
        Sampling::Weighted { index, .. } => index.sample(rng),
    }
}
