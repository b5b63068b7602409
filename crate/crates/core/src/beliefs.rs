//! Per-agent belief machinery: state spaces, likelihood tables, the Bayesian
//! and self-aware intermediate updates, the diffusion combine step,
//! forecasting, and the identifiability predicates.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{BlockRef, CombinationMatrix, NetworkPartition};

/// Tolerance for validating a probability vector.
pub const PMF_TOL: f64 = 1e-9;
/// Absolute per-entry tolerance when comparing likelihood rows.
pub const INDISTINGUISHABLE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("state space is empty")]
    EmptyStateSpace,

    #[error("duplicate state identifier `{0}`")]
    DuplicateState(String),

    #[error("agent {} has an empty signal space", .agent + 1)]
    EmptySignalSpace { agent: usize },

    #[error("duplicate signal `{signal}` for agent {}", .agent + 1)]
    DuplicateSignal { agent: usize, signal: String },

    #[error("likelihood row for state {} of agent {} is invalid: {detail}", .state + 1, .agent + 1)]
    LikelihoodRow {
        agent: usize,
        state: usize,
        detail: String,
    },

    #[error("not a probability vector: {0}")]
    InvalidPmf(String),

    #[error("observed signal has zero probability under every believed state")]
    ZeroEvidence,

    #[error("self-awareness factor {0} is outside [0, 1]")]
    InvalidGamma(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0}")]
    Truth(String),
}

pub type Result<T> = std::result::Result<T, BeliefError>;

/// Finite set of possible states, `Theta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(BeliefError::EmptyStateSpace);
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(BeliefError::DuplicateState(name.clone()));
            }
        }
        Ok(Self { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Checks that `p` is a probability vector within `PMF_TOL`.
pub fn check_pmf(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(BeliefError::InvalidPmf("empty".into()));
    }
    if let Some(x) = p.iter().find(|x| !(0.0..=1.0 + PMF_TOL).contains(*x)) {
        return Err(BeliefError::InvalidPmf(format!("entry {x} outside [0, 1]")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PMF_TOL {
        return Err(BeliefError::InvalidPmf(format!("sums to {sum}")));
    }
    Ok(())
}

/// Likelihood table of one agent: `table[theta][zeta] = L_k(zeta | theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentLikelihood {
    signals: Vec<String>,
    table: Vec<Vec<f64>>,
}

impl AgentLikelihood {
    /// `agent` is only used in error messages.
    pub fn new(agent: usize, signals: Vec<String>, table: Vec<Vec<f64>>) -> Result<Self> {
        if signals.is_empty() {
            return Err(BeliefError::EmptySignalSpace { agent });
        }
        let mut seen = BTreeSet::new();
        for s in &signals {
            if !seen.insert(s.as_str()) {
                return Err(BeliefError::DuplicateSignal {
                    agent,
                    signal: s.clone(),
                });
            }
        }
        let mut table = table;
        for (state, row) in table.iter_mut().enumerate() {
            let bad = |detail: String| BeliefError::LikelihoodRow {
                agent,
                state,
                detail,
            };
            if row.len() != signals.len() {
                return Err(bad(format!(
                    "{} entries for {} signals",
                    row.len(),
                    signals.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(bad(format!("entry {x} is not a probability")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PMF_TOL {
                return Err(bad(format!("sums to {sum}")));
            }
            if (sum - 1.0).abs() > crate::graph::RENORMALIZE_TOL {
                row.iter_mut().for_each(|x| *x /= sum);
            }
        }
        Ok(Self { signals, table })
    }

    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    pub fn n_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn n_states(&self) -> usize {
        self.table.len()
    }

    /// `L(. | theta)`.
    pub fn row(&self, theta: usize) -> &[f64] {
        &self.table[theta]
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    /// `L(zeta | .)` over all states.
    pub fn column(&self, zeta: usize) -> Vec<f64> {
        self.table.iter().map(|row| row[zeta]).collect()
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|s| s == name)
    }
}

/// Likelihood tables for every agent over a shared state space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LikelihoodModel {
    agents: Vec<AgentLikelihood>,
}

impl LikelihoodModel {
    pub fn new(n_states: usize, agents: Vec<AgentLikelihood>) -> Result<Self> {
        for (k, agent) in agents.iter().enumerate() {
            if agent.n_states() != n_states {
                return Err(BeliefError::Dimension(format!(
                    "agent {} has {} likelihood rows for {} states",
                    k + 1,
                    agent.n_states(),
                    n_states
                )));
            }
        }
        Ok(Self { agents })
    }

    pub fn agent(&self, k: usize) -> &AgentLikelihood {
        &self.agents[k]
    }

    pub fn agents(&self) -> &[AgentLikelihood] {
        &self.agents
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }
}

/// One probability vector over `Theta` per agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefState {
    rows: Vec<Vec<f64>>,
}

impl BeliefState {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(BeliefError::Dimension(format!(
                    "agent {} belief has {} entries, expected {m}",
                    k + 1,
                    row.len()
                )));
            }
            check_pmf(row).map_err(|e| BeliefError::InvalidPmf(format!("agent {}: {e}", k + 1)))?;
        }
        Ok(Self { rows })
    }

    pub fn uniform(n_agents: usize, n_states: usize) -> Self {
        Self {
            rows: vec![vec![1.0 / n_states as f64; n_states]; n_agents],
        }
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }

    pub fn agent(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_agents(&self) -> usize {
        self.rows.len()
    }

    pub fn n_states(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// Bayes' rule with the likelihood of the observed signal under each state.
pub fn bayesian_update(prior: &[f64], likelihood: &[f64]) -> Result<Vec<f64>> {
    if prior.len() != likelihood.len() {
        return Err(BeliefError::Dimension(format!(
            "prior over {} states, likelihood over {}",
            prior.len(),
            likelihood.len()
        )));
    }
    let evidence: f64 = prior.iter().zip(likelihood).map(|(p, l)| p * l).sum();
    if evidence <= 0.0 {
        return Err(BeliefError::ZeroEvidence);
    }
    Ok(prior
        .iter()
        .zip(likelihood)
        .map(|(p, l)| p * l / evidence)
        .collect())
}

/// Convex combination of the prior and its Bayesian posterior with weight
/// `gamma` on the posterior.
pub fn self_aware_intermediate(prior: &[f64], likelihood: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(BeliefError::InvalidGamma(gamma));
    }
    if gamma == 0.0 {
        if prior.len() != likelihood.len() {
            return Err(BeliefError::Dimension(
                "prior and likelihood lengths differ".into(),
            ));
        }
        return Ok(prior.to_vec());
    }
    let posterior = bayesian_update(prior, likelihood)?;
    Ok(prior
        .iter()
        .zip(&posterior)
        .map(|(p, q)| (1.0 - gamma) * p + gamma * q)
        .collect())
}

/// `mu_k = sum_l a_lk psi_l` for every agent.
pub fn diffusion_combine(intermediate: &BeliefState, matrix: &CombinationMatrix) -> BeliefState {
    let n = matrix.n_agents();
    let m = intermediate.n_states();
    let mut out = vec![vec![0.0; m]; n];
    for (k, mu) in out.iter_mut().enumerate() {
        for l in matrix.neighbors(k) {
            let a = matrix.weight(l, k);
            for (acc, psi) in mu.iter_mut().zip(intermediate.agent(l)) {
                *acc += a * psi;
            }
        }
    }
    BeliefState { rows: out }
}

/// Predicted distribution of the agent's next signal, `m(zeta) = sum_theta mu(theta) L(zeta|theta)`.
pub fn forecast(belief: &[f64], likelihood: &AgentLikelihood) -> Vec<f64> {
    let mut m = vec![0.0; likelihood.n_signals()];
    for (mu, row) in belief.iter().zip(likelihood.table()) {
        for (acc, l) in m.iter_mut().zip(row) {
            *acc += mu * l;
        }
    }
    m
}

/// States whose likelihood rows coincide with the truth's row within `tol`.
pub fn indistinguishable_set(
    likelihood: &AgentLikelihood,
    truth: usize,
    tol: f64,
) -> BTreeSet<usize> {
    let reference = likelihood.row(truth);
    (0..likelihood.n_states())
        .filter(|&theta| {
            likelihood
                .row(theta)
                .iter()
                .zip(reference)
                .all(|(a, b)| (a - b).abs() <= tol)
        })
        .collect()
}

/// Outcome of the global identifiability test for one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Identifiability {
    pub identifiable: bool,
    /// Intersection of the block's indistinguishable sets; `{truth}` when identifiable.
    pub intersection: BTreeSet<usize>,
}

impl Identifiability {
    /// States other than the truth that the block cannot rule out.
    pub fn leftover(&self, truth: usize) -> Vec<usize> {
        self.intersection
            .iter()
            .copied()
            .filter(|&t| t != truth)
            .collect()
    }
}

pub fn globally_identifiable(
    block: &[usize],
    truth: usize,
    model: &LikelihoodModel,
) -> Identifiability {
    let mut intersection: BTreeSet<usize> = (0..model.agent(block[0]).n_states()).collect();
    for &k in block {
        let set = indistinguishable_set(model.agent(k), truth, INDISTINGUISHABLE_TOL);
        intersection.retain(|t| set.contains(t));
    }
    Identifiability {
        identifiable: intersection.len() == 1,
        intersection,
    }
}

/// A signal at least as likely under the truth as under every distinguishable
/// state. Equality counts.
pub fn prevailing_signal(likelihood: &AgentLikelihood, truth: usize) -> Option<usize> {
    let same = indistinguishable_set(likelihood, truth, INDISTINGUISHABLE_TOL);
    let others: Vec<usize> = (0..likelihood.n_states())
        .filter(|t| !same.contains(t))
        .collect();
    (0..likelihood.n_signals()).find(|&zeta| {
        let at_truth = likelihood.row(truth)[zeta];
        others
            .iter()
            .all(|&theta| at_truth - likelihood.row(theta)[zeta] >= 0.0)
    })
}

/// True state of every sub-network, sending blocks first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrueStateAssignment {
    sending: Vec<usize>,
    receiving: Vec<usize>,
}

impl TrueStateAssignment {
    pub fn new(sending: Vec<usize>, receiving: Vec<usize>) -> Self {
        Self { sending, receiving }
    }

    /// Builds the block assignment from one true state per agent, rejecting
    /// blocks whose agents disagree.
    pub fn from_agents(partition: &NetworkPartition, per_agent: &[usize]) -> Result<Self> {
        let pick = |blocks: &[Vec<usize>]| -> Result<Vec<usize>> {
            blocks
                .iter()
                .map(|block| {
                    let t = per_agent[block[0]];
                    if let Some(&k) = block.iter().find(|&&k| per_agent[k] != t) {
                        return Err(BeliefError::Truth(format!(
                            "agents {} and {} share a sub-network but have different true states",
                            block[0] + 1,
                            k + 1
                        )));
                    }
                    Ok(t)
                })
                .collect()
        };
        Ok(Self {
            sending: pick(partition.sending_blocks())?,
            receiving: pick(partition.receiving_blocks())?,
        })
    }

    pub fn sending(&self) -> &[usize] {
        &self.sending
    }

    pub fn receiving(&self) -> &[usize] {
        &self.receiving
    }

    pub fn of_agent(&self, partition: &NetworkPartition, agent: usize) -> usize {
        match partition.block_of(agent) {
            BlockRef::Sending(s) => self.sending[s],
            BlockRef::Receiving(r) => self.receiving[r],
        }
    }

    /// Distinct true states of the sending blocks.
    pub fn sending_states(&self) -> BTreeSet<usize> {
        self.sending.iter().copied().collect()
    }

    /// States not held as truth by any sending block.
    pub fn non_sending_states(&self, n_states: usize) -> BTreeSet<usize> {
        let s = self.sending_states();
        (0..n_states).filter(|t| !s.contains(t)).collect()
    }
}

/// Per-agent, per-time self-awareness factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AwarenessSchedule {
    /// One factor per agent, used at every step.
    Constant(Vec<f64>),
    /// `steps[i - 1][k]` is the factor of agent `k` at step `i`; the last row
    /// repeats past the end.
    Varying(Vec<Vec<f64>>),
}

impl AwarenessSchedule {
    pub fn validate(&self, n_agents: usize) -> Result<()> {
        let rows: Vec<&Vec<f64>> = match self {
            Self::Constant(g) => vec![g],
            Self::Varying(steps) if steps.is_empty() => {
                return Err(BeliefError::Dimension("empty awareness schedule".into()))
            }
            Self::Varying(steps) => steps.iter().collect(),
        };
        for row in rows {
            if row.len() != n_agents {
                return Err(BeliefError::Dimension(format!(
                    "awareness schedule has {} agents, expected {n_agents}",
                    row.len()
                )));
            }
            if let Some(&g) = row.iter().find(|g| !(0.0..=1.0).contains(*g)) {
                return Err(BeliefError::InvalidGamma(g));
            }
        }
        Ok(())
    }

    /// `gamma_{k,i}` for step `i >= 1`.
    pub fn gamma(&self, agent: usize, step: usize) -> f64 {
        match self {
            Self::Constant(g) => g[agent],
            Self::Varying(steps) => {
                let i = step.saturating_sub(1).min(steps.len() - 1);
                steps[i][agent]
            }
        }
    }

    /// Supremum over every agent and step.
    pub fn gamma_max(&self) -> f64 {
        self.rows().flatten().copied().fold(0.0, f64::max)
    }

    /// Supremum over the given agents.
    pub fn gamma_max_over(&self, agents: &[usize]) -> f64 {
        self.rows()
            .flat_map(|row| agents.iter().map(move |&k| row[k]))
            .fold(0.0, f64::max)
    }

    /// `tau_{k,i} = gamma_{k,i} / gamma_max`, zero when `gamma_max` is zero.
    pub fn tau(&self, agent: usize, step: usize) -> f64 {
        let max = self.gamma_max();
        if max > 0.0 {
            self.gamma(agent, step) / max
        } else {
            0.0
        }
    }

    fn rows(&self) -> Box<dyn Iterator<Item = &Vec<f64>> + '_> {
        match self {
            Self::Constant(g) => Box::new(std::iter::once(g)),
            Self::Varying(steps) => Box::new(steps.iter()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(agent: usize, heads: &[f64]) -> AgentLikelihood {
        AgentLikelihood::new(
            agent,
            vec!["H".into(), "T".into()],
            heads.iter().map(|&h| vec![h, 1.0 - h]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn state_space_rejects_duplicates() {
        assert_eq!(
            StateSpace::new(Vec::<String>::new()).unwrap_err(),
            BeliefError::EmptyStateSpace
        );
        assert!(matches!(
            StateSpace::new(["a", "a"]),
            Err(BeliefError::DuplicateState(_))
        ));
        let s = StateSpace::new(["a", "b"]).unwrap();
        assert_eq!(s.index_of("b"), Some(1));
    }

    #[test]
    fn likelihood_row_must_sum_to_one() {
        let err = AgentLikelihood::new(0, vec!["H".into(), "T".into()], vec![vec![0.5, 0.6]]);
        assert!(matches!(
            err,
            Err(BeliefError::LikelihoodRow { state: 0, .. })
        ));
    }

    #[test]
    fn bayes_examples() {
        let post = bayesian_update(&[0.5, 0.5], &[0.8, 0.2]).unwrap();
        assert!((post[0] - 0.8).abs() < 1e-15 && (post[1] - 0.2).abs() < 1e-15);

        let prior = [0.2, 0.3, 0.5];
        assert_eq!(bayesian_update(&prior, &[0.6, 0.6, 0.6]).unwrap(), prior);

        assert_eq!(
            bayesian_update(&[1.0, 0.0], &[0.3, 0.9]).unwrap(),
            vec![1.0, 0.0]
        );
        assert_eq!(
            bayesian_update(&[1.0, 0.0], &[0.0, 0.9]).unwrap_err(),
            BeliefError::ZeroEvidence
        );
    }

    #[test]
    fn self_aware_endpoints_and_midpoint() {
        let prior = [0.5, 0.5];
        let lik = [0.8, 0.2];
        assert_eq!(
            self_aware_intermediate(&prior, &lik, 1.0).unwrap(),
            bayesian_update(&prior, &lik).unwrap()
        );
        assert_eq!(self_aware_intermediate(&prior, &lik, 0.0).unwrap(), prior);
        let mid = self_aware_intermediate(&prior, &lik, 0.5).unwrap();
        assert!((mid[0] - 0.65).abs() < 1e-15 && (mid[1] - 0.35).abs() < 1e-15);
        // zero evidence only matters when the posterior is used
        assert!(self_aware_intermediate(&[1.0, 0.0], &[0.0, 1.0], 0.0).is_ok());
        assert_eq!(
            self_aware_intermediate(&[1.0, 0.0], &[0.0, 1.0], 0.3).unwrap_err(),
            BeliefError::ZeroEvidence
        );
        assert!(matches!(
            self_aware_intermediate(&prior, &lik, 1.5),
            Err(BeliefError::InvalidGamma(_))
        ));
    }

    #[test]
    fn combine_examples() {
        let single = CombinationMatrix::from_rows(&[vec![1.0]]).unwrap();
        let psi = BeliefState::new(vec![vec![0.3, 0.7]]).unwrap();
        assert_eq!(diffusion_combine(&psi, &single), psi);

        let avg = CombinationMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let psi = BeliefState::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mu = diffusion_combine(&psi, &avg);
        assert_eq!(mu.rows(), [vec![0.5, 0.5], vec![0.5, 0.5]]);

        let three = CombinationMatrix::from_rows(&[
            vec![1.0, 0.0, 0.1],
            vec![0.0, 1.0, 0.2],
            vec![0.0, 0.0, 0.7],
        ])
        .unwrap();
        let psi = BeliefState::new(vec![
            vec![0.9, 0.05, 0.05],
            vec![0.1, 0.8, 0.1],
            vec![0.2, 0.2, 0.6],
        ])
        .unwrap();
        let mu = diffusion_combine(&psi, &three);
        for theta in 0..3 {
            let expected =
                0.1 * psi.agent(0)[theta] + 0.2 * psi.agent(1)[theta] + 0.7 * psi.agent(2)[theta];
            assert!((mu.agent(2)[theta] - expected).abs() < 1e-15);
        }
        assert_eq!(mu.agent(0), psi.agent(0));
    }

    #[test]
    fn forecast_examples() {
        let l = binary(0, &[0.1, 0.35, 0.45]);
        assert_eq!(forecast(&[0.0, 1.0, 0.0], &l), l.row(1));
        let m = forecast(&[0.5, 0.5, 0.0], &l);
        assert!((m[0] - 0.225).abs() < 1e-15 && (m[1] - 0.775).abs() < 1e-15);
    }

    #[test]
    fn indistinguishable_sets() {
        let flat = binary(0, &[0.25, 0.25, 0.25]);
        assert_eq!(
            indistinguishable_set(&flat, 2, INDISTINGUISHABLE_TOL),
            BTreeSet::from([0, 1, 2])
        );
        let distinct = binary(0, &[0.1, 0.35, 0.45]);
        assert_eq!(
            indistinguishable_set(&distinct, 0, INDISTINGUISHABLE_TOL),
            BTreeSet::from([0])
        );
    }

    #[test]
    fn identifiability() {
        let model = LikelihoodModel::new(3, vec![binary(0, &[0.1, 0.35, 0.45])]).unwrap();
        assert!(globally_identifiable(&[0], 0, &model).identifiable);

        let model =
            LikelihoodModel::new(3, vec![binary(0, &[0.5; 3]), binary(1, &[0.5; 3])]).unwrap();
        let id = globally_identifiable(&[0, 1], 1, &model);
        assert!(!id.identifiable);
        assert_eq!(id.intersection, BTreeSet::from([0, 1, 2]));
        assert_eq!(id.leftover(1), vec![0, 2]);
    }

    #[test]
    fn prevailing_signal_examples() {
        let agent1 = binary(0, &[0.10, 0.35, 0.45]);
        assert_eq!(prevailing_signal(&agent1, 0), Some(1));
        let flat = binary(0, &[0.4, 0.4, 0.4]);
        assert_eq!(prevailing_signal(&flat, 1), Some(0));
        // tie with a distinguishable state still counts
        let tie = binary(0, &[0.3, 0.5, 0.3]);
        assert_eq!(prevailing_signal(&tie, 1), Some(0));
    }

    #[test]
    fn awareness_schedule() {
        let s = AwarenessSchedule::Constant(vec![0.4, 0.5, 0.1]);
        assert_eq!(s.gamma_max(), 0.5);
        assert_eq!(s.gamma_max_over(&[2]), 0.1);
        assert!((s.tau(0, 7) - 0.8).abs() < 1e-15);
        assert!(s.validate(3).is_ok());
        assert!(s.validate(2).is_err());

        let v = AwarenessSchedule::Varying(vec![vec![0.2, 0.0], vec![0.1, 0.3]]);
        assert_eq!(v.gamma(0, 1), 0.2);
        assert_eq!(v.gamma(1, 50), 0.3);
        assert_eq!(v.gamma_max(), 0.3);
        assert!(AwarenessSchedule::Constant(vec![1.2]).validate(1).is_err());
        assert_eq!(AwarenessSchedule::Constant(vec![0.0, 0.0]).tau(0, 1), 0.0);
    }

    #[test]
    fn truth_assignment_rejects_mixed_block() {
        let a = CombinationMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let p = crate::graph::classify(&a).unwrap();
        assert!(TrueStateAssignment::from_agents(&p, &[0, 1]).is_err());
        let t = TrueStateAssignment::from_agents(&p, &[1, 1]).unwrap();
        assert_eq!(t.sending(), [1]);
        assert_eq!(t.non_sending_states(3), BTreeSet::from([0, 2]));
    }
}
