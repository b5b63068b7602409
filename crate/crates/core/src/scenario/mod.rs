//! Scenario ingestion, bundled fixtures, assumption checks and all file I/O.

pub mod fixtures;
mod report;
mod schema;
mod trace_csv;

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::beliefs::{
    globally_identifiable, indistinguishable_set, prevailing_signal, AgentLikelihood,
    AwarenessSchedule, BeliefState, LikelihoodModel, StateSpace, TrueStateAssignment,
    INDISTINGUISHABLE_TOL,
};
use crate::graph::{classify, CombinationMatrix, GraphError, NetworkPartition, SpectralSummary};
use crate::predict::{self, ConfinementBand, LimitPrediction};

pub use report::{
    AnalysisReport, AssumptionView, BandRow, PredictionReport, PredictionRow, ReceivingView,
    SendingView, VerificationReport, VerificationRow,
};
pub use schema::parse_number;
pub use trace_csv::{export_trace, read_trace, write_trace, TraceRow};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid {component}: {detail}")]
    Validation { component: String, detail: String },

    #[error("unknown bundled fixture `{0}`")]
    UnknownFixture(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

fn invalid(component: impl Into<String>, detail: impl ToString) -> ScenarioError {
    ScenarioError::Validation {
        component: component.into(),
        detail: detail.to_string(),
    }
}

/// A fully validated experiment definition.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    matrix: CombinationMatrix,
    partition: NetworkPartition,
    space: StateSpace,
    models: LikelihoodModel,
    agent_truths: Vec<usize>,
    truth: TrueStateAssignment,
    priors: BeliefState,
    awareness: Option<AwarenessSchedule>,
}

impl Scenario {
    /// Validates every component and their cross-references. `priors`
    /// defaults to uniform.
    pub fn new(
        matrix: CombinationMatrix,
        space: StateSpace,
        models: LikelihoodModel,
        agent_truths: Vec<usize>,
        priors: Option<BeliefState>,
        awareness: Option<AwarenessSchedule>,
    ) -> Result<Self> {
        let n = matrix.n_agents();
        let m = space.len();
        let partition = classify(&matrix).map_err(|e| invalid("network", e))?;
        if models.n_agents() != n {
            return Err(invalid(
                "likelihoods",
                format!("{} agent tables for {n} agents", models.n_agents()),
            ));
        }
        if let Some((k, _)) = models
            .agents()
            .iter()
            .enumerate()
            .find(|(_, a)| a.n_states() != m)
        {
            return Err(invalid(
                "likelihoods",
                format!("agent {} table has wrong state count", k + 1),
            ));
        }
        if agent_truths.len() != n {
            return Err(invalid(
                "truth",
                format!("{} entries for {n} agents", agent_truths.len()),
            ));
        }
        if let Some(&t) = agent_truths.iter().find(|&&t| t >= m) {
            return Err(invalid("truth", format!("state index {t} out of range")));
        }
        let truth = TrueStateAssignment::from_agents(&partition, &agent_truths)
            .map_err(|e| invalid("truth", e))?;
        let priors = priors.unwrap_or_else(|| BeliefState::uniform(n, m));
        if priors.n_agents() != n || priors.n_states() != m {
            return Err(invalid(
                "priors",
                format!("expected {n} beliefs over {m} states"),
            ));
        }
        if let Some(a) = &awareness {
            a.validate(n).map_err(|e| invalid("awareness", e))?;
        }
        Ok(Self {
            name: String::new(),
            description: String::new(),
            matrix,
            partition,
            space,
            models,
            agent_truths,
            truth,
            priors,
            awareness,
        })
    }

    pub fn with_metadata(
        mut self,
        name: impl Into<String>,
        description: impl Into<String>,
    ) -> Self {
        self.name = name.into();
        self.description = description.into();
        self
    }

    pub fn matrix(&self) -> &CombinationMatrix {
        &self.matrix
    }

    pub fn partition(&self) -> &NetworkPartition {
        &self.partition
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn models(&self) -> &LikelihoodModel {
        &self.models
    }

    /// True state index of each agent, original order.
    pub fn agent_truths(&self) -> &[usize] {
        &self.agent_truths
    }

    pub fn truth(&self) -> &TrueStateAssignment {
        &self.truth
    }

    pub fn priors(&self) -> &BeliefState {
        &self.priors
    }

    pub fn awareness(&self) -> Option<&AwarenessSchedule> {
        self.awareness.as_ref()
    }

    pub fn n_agents(&self) -> usize {
        self.matrix.n_agents()
    }

    pub fn label(&self, agent: usize) -> &str {
        &self.matrix.labels()[agent]
    }

    pub fn spectral(&self) -> std::result::Result<SpectralSummary, GraphError> {
        SpectralSummary::compute(&self.matrix, &self.partition)
    }

    pub fn prediction(&self) -> std::result::Result<LimitPrediction, GraphError> {
        let w = crate::graph::influence_matrix(&self.partition)?;
        predict::limiting_beliefs(&w, &self.partition, &self.truth, &self.space)
    }

    /// Bands around the prediction using the largest awareness factor among
    /// receiving agents, or `gamma_max` when given.
    pub fn bands(
        &self,
        gamma_max: Option<f64>,
    ) -> std::result::Result<Option<Vec<ConfinementBand>>, GraphError> {
        let gamma = match (gamma_max, &self.awareness) {
            (Some(g), _) => g,
            (None, Some(a)) => a.gamma_max_over(self.partition.receiving_agents()),
            (None, None) => return Ok(None),
        };
        let c = crate::graph::confinement_matrix(&self.partition)?;
        Ok(Some(predict::confinement_bands(
            &self.prediction()?,
            &c,
            gamma,
        )))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: schema::Document = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |span| {
                text[..span.start.min(text.len())].matches('\n').count() + 1
            });
            ScenarioError::Parse {
                line,
                message: e.message().to_string(),
            }
        })?;
        from_document(doc)
    }

    /// Canonical text form; `from_toml_str(to_toml_string())` reproduces `self`.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&to_document(self)).expect("scenario documents always serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn check_assumptions(&self) -> AssumptionReport {
        check_assumptions(self)
    }
}

/// Reads and validates a scenario file.
pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut scenario = Scenario::from_toml_str(&text)?;
    if scenario.name.is_empty() {
        scenario.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(scenario)
}

fn numbers(component: &str, row: &[schema::Number]) -> Result<Vec<f64>> {
    row.iter()
        .map(|x| x.value().map_err(|e| invalid(component, e)))
        .collect()
}

fn table(component: &str, rows: &[Vec<schema::Number>]) -> Result<Vec<Vec<f64>>> {
    rows.iter().map(|r| numbers(component, r)).collect()
}

fn from_document(doc: schema::Document) -> Result<Scenario> {
    let [rows, cols] = doc.network.dimensions;
    let weights = table("network", &doc.network.weights)?;
    if weights.len() != rows || weights.iter().any(|r| r.len() != cols) {
        return Err(invalid(
            "network",
            format!("weights do not match declared dimensions {rows}x{cols}"),
        ));
    }
    let dense = DMatrix::from_fn(rows, cols, |l, k| weights[l][k]);
    let matrix = match doc.network.labels {
        Some(labels) => CombinationMatrix::with_labels(dense, labels),
        None => CombinationMatrix::new(dense),
    }
    .map_err(|e| invalid("network", e))?;
    let n = matrix.n_agents();

    let space = StateSpace::new(doc.states.names).map_err(|e| invalid("states", e))?;
    let m = space.len();

    let agents = match (doc.likelihood_matrix, doc.likelihoods.is_empty()) {
        (Some(_), false) => {
            return Err(invalid(
                "likelihoods",
                "give either [likelihoods.*] or [likelihood_matrix], not both",
            ))
        }
        (Some(shared), true) => shared_tables(&shared, n, m)?,
        (None, _) => {
            let mut agents = Vec::with_capacity(n);
            for (k, label) in matrix.labels().iter().enumerate() {
                let t = doc.likelihoods.get(label).ok_or_else(|| {
                    invalid("likelihoods", format!("missing table for agent `{label}`"))
                })?;
                let rows = table("likelihoods", &t.rows)?;
                agents.push(
                    AgentLikelihood::new(k, t.signals.clone(), rows)
                        .map_err(|e| invalid("likelihoods", e))?,
                );
            }
            if let Some(extra) = doc
                .likelihoods
                .keys()
                .find(|key| !matrix.labels().contains(key))
            {
                return Err(invalid(
                    "likelihoods",
                    format!("table for unknown agent `{extra}`"),
                ));
            }
            agents
        }
    };
    let models = LikelihoodModel::new(m, agents).map_err(|e| invalid("likelihoods", e))?;

    let agent_truths = doc
        .truth
        .agents
        .iter()
        .map(|name| {
            space
                .index_of(name)
                .ok_or_else(|| invalid("truth", format!("unknown state `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    let priors = doc
        .priors
        .map(|p| {
            let rows = table("priors", &p.beliefs)?;
            BeliefState::new(rows).map_err(|e| invalid("priors", e))
        })
        .transpose()?;

    let awareness = doc
        .awareness
        .map(|a| match (a.gamma, a.schedule) {
            (Some(g), None) => Ok(AwarenessSchedule::Constant(numbers("awareness", &g)?)),
            (None, Some(s)) => Ok(AwarenessSchedule::Varying(table("awareness", &s)?)),
            _ => Err(invalid(
                "awareness",
                "give exactly one of `gamma` or `schedule`",
            )),
        })
        .transpose()?;

    Ok(
        Scenario::new(matrix, space, models, agent_truths, priors, awareness)?
            .with_metadata(doc.name, doc.description),
    )
}

fn shared_tables(shared: &schema::SharedTable, n: usize, m: usize) -> Result<Vec<AgentLikelihood>> {
    let signals = &shared.signals;
    let missing: Vec<&String> = signals
        .iter()
        .filter(|s| !shared.tables.contains_key(*s))
        .collect();
    if missing.len() > 1 {
        return Err(invalid(
            "likelihood_matrix",
            "at most one signal table may be omitted",
        ));
    }
    if let Some(extra) = shared.tables.keys().find(|k| !signals.contains(k)) {
        return Err(invalid(
            "likelihood_matrix",
            format!("table for undeclared signal `{extra}`"),
        ));
    }
    let mut per_signal: Vec<Option<Vec<Vec<f64>>>> = Vec::new();
    for s in signals {
        per_signal.push(match shared.tables.get(s) {
            Some(t) => {
                let t = table("likelihood_matrix", t)?;
                if t.len() != m || t.iter().any(|r| r.len() != n) {
                    return Err(invalid(
                        "likelihood_matrix",
                        format!("table `{s}` must be {m} states x {n} agents"),
                    ));
                }
                Some(t)
            }
            None => None,
        });
    }
    (0..n)
        .map(|k| {
            let rows = (0..m)
                .map(|theta| {
                    let given: f64 = per_signal.iter().flatten().map(|t| t[theta][k]).sum();
                    per_signal
                        .iter()
                        .map(|t| t.as_ref().map_or(1.0 - given, |t| t[theta][k]))
                        .collect()
                })
                .collect();
            AgentLikelihood::new(k, signals.clone(), rows)
                .map_err(|e| invalid("likelihood_matrix", e))
        })
        .collect()
}

fn to_document(s: &Scenario) -> schema::Document {
    let num_rows = |rows: &[Vec<f64>]| -> Vec<Vec<schema::Number>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| x.into()).collect())
            .collect()
    };
    let n = s.n_agents();
    let labels = s.matrix.labels().to_vec();
    let default_labels = labels
        .iter()
        .enumerate()
        .all(|(i, l)| *l == (i + 1).to_string());
    schema::Document {
        name: s.name.clone(),
        description: s.description.clone(),
        network: schema::Network {
            dimensions: [n, n],
            labels: (!default_labels).then(|| labels.clone()),
            weights: num_rows(&s.matrix.rows()),
        },
        states: schema::States {
            names: s.space.names().to_vec(),
        },
        likelihoods: s
            .models
            .agents()
            .iter()
            .zip(&labels)
            .map(|(a, label)| {
                (
                    label.clone(),
                    schema::AgentTable {
                        signals: a.signals().to_vec(),
                        rows: num_rows(a.table()),
                    },
                )
            })
            .collect(),
        likelihood_matrix: None,
        truth: schema::Truth {
            agents: s
                .agent_truths
                .iter()
                .map(|&t| s.space.names()[t].clone())
                .collect(),
        },
        priors: Some(schema::Priors {
            beliefs: num_rows(s.priors.rows()),
        }),
        awareness: s.awareness.as_ref().map(|a| match a {
            AwarenessSchedule::Constant(g) => schema::Awareness {
                gamma: Some(g.iter().map(|&x| x.into()).collect()),
                schedule: None,
            },
            AwarenessSchedule::Varying(steps) => schema::Awareness {
                gamma: None,
                schedule: Some(num_rows(steps)),
            },
        }),
    }
}

/// Which closed-form statement covers the receiving agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitRegime {
    /// Receivers converge to the point prediction.
    TotalInfluence,
    /// Self-aware receivers stay inside the confinement bands.
    Confined,
    /// No fixed limit is predicted.
    Unpredicted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceivingCheck {
    pub agent: usize,
    pub indistinguishable: BTreeSet<usize>,
    /// Every sending truth lies in the agent's indistinguishable set.
    pub holds: bool,
    /// Sending truths the agent can tell apart from its own truth.
    pub missing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SendingCheck {
    pub block: Vec<usize>,
    pub truth: usize,
    pub identifiable: bool,
    /// States the block cannot rule out besides its truth.
    pub leftover: Vec<usize>,
    /// Prevailing signal index per agent in `block`.
    pub prevailing: Vec<Option<usize>>,
    /// Some agent of the block with positive prior mass on the truth.
    pub positive_prior: Option<usize>,
}

impl SendingCheck {
    pub fn learns_truth(&self) -> bool {
        self.identifiable && self.positive_prior.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub receiving: Vec<ReceivingCheck>,
    pub sending: Vec<SendingCheck>,
    pub regime: LimitRegime,
}

/// Static checks on the scenario; no simulation involved.
pub fn check_assumptions(s: &Scenario) -> AssumptionReport {
    let p = s.partition();
    let sending: Vec<SendingCheck> = p
        .sending_blocks()
        .iter()
        .zip(s.truth().sending())
        .map(|(block, &truth)| {
            let id = globally_identifiable(block, truth, s.models());
            SendingCheck {
                block: block.clone(),
                truth,
                identifiable: id.identifiable,
                leftover: id.leftover(truth),
                prevailing: block
                    .iter()
                    .map(|&k| prevailing_signal(s.models().agent(k), truth))
                    .collect(),
                positive_prior: block
                    .iter()
                    .copied()
                    .find(|&k| s.priors().agent(k)[truth] > 0.0),
            }
        })
        .collect();

    let support = s.truth().sending_states();
    let receiving: Vec<ReceivingCheck> = p
        .receiving_agents()
        .iter()
        .map(|&k| {
            let set = indistinguishable_set(
                s.models().agent(k),
                s.agent_truths()[k],
                INDISTINGUISHABLE_TOL,
            );
            let missing: Vec<usize> = support
                .iter()
                .copied()
                .filter(|t| !set.contains(t))
                .collect();
            ReceivingCheck {
                agent: k,
                holds: missing.is_empty(),
                indistinguishable: set,
                missing,
            }
        })
        .collect();

    let regime = if !sending.iter().all(SendingCheck::learns_truth) {
        LimitRegime::Unpredicted
    } else if s.awareness().is_some() {
        LimitRegime::Confined
    } else if receiving.iter().all(|r| r.holds) {
        LimitRegime::TotalInfluence
    } else {
        LimitRegime::Unpredicted
    };
    AssumptionReport {
        receiving,
        sending,
        regime,
    }
}
