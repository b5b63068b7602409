//! Closed-form limiting beliefs.
//!
//! Under total influence a receiving agent `k` ends up with
//!
//! ```text
//! q_k(theta) = sum over sending blocks s with truth theta of  sum_{l in s} W[l, k]
//! ```
//!
//! i.e. the entries of column `k` of `W` are summed block by block and
//! accumulated onto each block's true state. Self-aware receivers are only
//! confined to `q_k +/- gamma_max (C 1)_k`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::beliefs::{StateSpace, TrueStateAssignment};
use crate::graph::{GraphError, NetworkPartition};

/// Predicted limiting belief of every agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPrediction {
    /// Indexed by original agent index.
    beliefs: Vec<Vec<f64>>,
    receiving_agents: Vec<usize>,
    sending_agents: Vec<usize>,
    support: BTreeSet<usize>,
}

impl LimitPrediction {
    pub fn agent(&self, k: usize) -> &[f64] {
        &self.beliefs[k]
    }

    pub fn beliefs(&self) -> &[Vec<f64>] {
        &self.beliefs
    }

    /// Receiving agents in canonical order (row order of `C`, column order of `W`).
    pub fn receiving_agents(&self) -> &[usize] {
        &self.receiving_agents
    }

    pub fn sending_agents(&self) -> &[usize] {
        &self.sending_agents
    }

    /// `Theta_bullet`: the distinct true states of the sending blocks.
    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }
}

/// Limiting beliefs from `W`, the partition and the block truths.
pub fn limiting_beliefs(
    influence: &DMatrix<f64>,
    partition: &NetworkPartition,
    truth: &TrueStateAssignment,
    space: &StateSpace,
) -> Result<LimitPrediction, GraphError> {
    let (ns, nr) = (partition.n_sending(), partition.n_receiving());
    if influence.shape() != (ns, nr) {
        return Err(GraphError::Dimension(format!(
            "influence matrix is {:?}, partition needs ({ns}, {nr})",
            influence.shape()
        )));
    }
    if truth.sending().len() != partition.sending_blocks().len() {
        return Err(GraphError::Dimension(
            "one true state per sending block required".into(),
        ));
    }
    let m = space.len();
    let n = ns + nr;
    let mut beliefs = vec![vec![0.0; m]; n];

    for (block, &theta) in partition.sending_blocks().iter().zip(truth.sending()) {
        for &k in block {
            beliefs[k][theta] = 1.0;
        }
    }

    for (j, &k) in partition.receiving_agents().iter().enumerate() {
        let mut offset = 0;
        for (block, &theta) in partition.sending_blocks().iter().zip(truth.sending()) {
            let mass: f64 = (offset..offset + block.len())
                .map(|i| influence[(i, j)])
                .sum();
            beliefs[k][theta] += mass;
            offset += block.len();
        }
    }

    Ok(LimitPrediction {
        beliefs,
        receiving_agents: partition.receiving_agents().to_vec(),
        sending_agents: partition.sending_agents().to_vec(),
        support: truth.sending_states(),
    })
}

/// Interval bounds on a self-aware receiving agent's limiting belief.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementBand {
    pub agent: usize,
    /// `gamma_max (C 1)_k`.
    pub half_width: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub raw_lower: Vec<f64>,
    pub raw_upper: Vec<f64>,
}

impl ConfinementBand {
    /// Whether `belief` lies inside the unclamped band.
    pub fn contains(&self, belief: &[f64]) -> bool {
        belief
            .iter()
            .zip(self.raw_lower.iter().zip(&self.raw_upper))
            .all(|(b, (lo, hi))| lo <= b && b <= hi)
    }
}

pub fn confinement_bands(
    prediction: &LimitPrediction,
    confinement: &DMatrix<f64>,
    gamma_max: f64,
) -> Vec<ConfinementBand> {
    prediction
        .receiving_agents()
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let half_width = gamma_max * confinement.row(j).sum();
            let q = prediction.agent(k);
            let raw_lower: Vec<f64> = q.iter().map(|x| x - half_width).collect();
            let raw_upper: Vec<f64> = q.iter().map(|x| x + half_width).collect();
            ConfinementBand {
                agent: k,
                half_width,
                lower: raw_lower.iter().map(|x| x.clamp(0.0, 1.0)).collect(),
                upper: raw_upper.iter().map(|x| x.clamp(0.0, 1.0)).collect(),
                raw_lower,
                raw_upper,
            }
        })
        .collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Pairwise total-variation distances between receiving agents' limits, in
/// canonical receiving order. Empty when there is no pair to compare.
pub fn predicted_social_disagreement(prediction: &LimitPrediction) -> DMatrix<f64> {
    let r = prediction.receiving_agents();
    if r.len() < 2 {
        return DMatrix::zeros(0, 0);
    }
    DMatrix::from_fn(r.len(), r.len(), |i, j| {
        total_variation(prediction.agent(r[i]), prediction.agent(r[j]))
    })
}
