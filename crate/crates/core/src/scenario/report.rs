//! Human-readable and JSON reports. Agents are 1-based and states are named.

use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{AssumptionReport, LimitRegime, Scenario};
use crate::graph::GraphError;
use crate::predict::ConfinementBand;
use crate::sim::ConvergenceReport;

fn one_based(agents: &[usize]) -> Vec<usize> {
    agents.iter().map(|k| k + 1).collect()
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", cells.join(", "))
}

fn fmt_blocks(blocks: &[Vec<usize>]) -> String {
    if blocks.is_empty() {
        return "none".into();
    }
    let parts: Vec<String> = blocks
        .iter()
        .map(|b| {
            format!(
                "{{{}}}",
                b.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    parts.join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceivingView {
    pub agent: usize,
    pub holds: bool,
    pub indistinguishable: Vec<String>,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SendingView {
    pub agents: Vec<usize>,
    pub truth: String,
    pub identifiable: bool,
    pub leftover: Vec<String>,
    pub prevailing: Vec<Option<String>>,
    pub positive_prior: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionView {
    pub regime: LimitRegime,
    pub sending: Vec<SendingView>,
    pub receiving: Vec<ReceivingView>,
}

impl AssumptionView {
    pub fn new(scenario: &Scenario, report: &AssumptionReport) -> Self {
        let names = scenario.space().names();
        let named =
            |it: &mut dyn Iterator<Item = usize>| it.map(|t| names[t].clone()).collect::<Vec<_>>();
        Self {
            regime: report.regime,
            sending: report
                .sending
                .iter()
                .map(|s| SendingView {
                    agents: one_based(&s.block),
                    truth: names[s.truth].clone(),
                    identifiable: s.identifiable,
                    leftover: named(&mut s.leftover.iter().copied()),
                    prevailing: s
                        .block
                        .iter()
                        .zip(&s.prevailing)
                        .map(|(&k, z)| z.map(|z| scenario.models().agent(k).signals()[z].clone()))
                        .collect(),
                    positive_prior: s.positive_prior.map(|k| k + 1),
                })
                .collect(),
            receiving: report
                .receiving
                .iter()
                .map(|r| ReceivingView {
                    agent: r.agent + 1,
                    holds: r.holds,
                    indistinguishable: named(&mut r.indistinguishable.iter().copied()),
                    missing: named(&mut r.missing.iter().copied()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for AssumptionView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sending {
            write!(f, "  sending {:?} truth {}: ", s.agents, s.truth)?;
            if s.identifiable {
                write!(f, "identifiable")?;
            } else {
                write!(
                    f,
                    "NOT identifiable (cannot exclude {})",
                    s.leftover.join(", ")
                )?;
            }
            match s.positive_prior {
                Some(k) => writeln!(f, ", positive prior at agent {k}")?,
                None => writeln!(f, ", no agent has positive prior on the truth")?,
            }
        }
        for r in &self.receiving {
            if r.holds {
                writeln!(
                    f,
                    "  receiving agent {}: sending truths indistinguishable, ok",
                    r.agent
                )?;
            } else {
                writeln!(
                    f,
                    "  receiving agent {}: distinguishes {}",
                    r.agent,
                    r.missing.join(", ")
                )?;
            }
        }
        let regime = match self.regime {
            LimitRegime::TotalInfluence => "receivers converge to the predicted limits",
            LimitRegime::Confined => "receivers confined to bands around the predicted limits",
            LimitRegime::Unpredicted => "no limit is predicted for the receivers",
        };
        writeln!(f, "  regime: {regime}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub scenario: String,
    pub n_agents: usize,
    pub sending_blocks: Vec<Vec<usize>>,
    pub receiving_blocks: Vec<Vec<usize>>,
    pub perron_vectors: Vec<Vec<f64>>,
    pub receiving_radii: Vec<f64>,
    /// Canonical agent order used by `influence_transpose` and `confinement`.
    pub sending_agents: Vec<usize>,
    pub receiving_agents: Vec<usize>,
    /// Row per receiving agent, column per sending agent. `None` without receivers.
    pub influence_transpose: Option<Vec<Vec<f64>>>,
    pub confinement: Option<Vec<Vec<f64>>>,
    /// Limit of `A^i`, original order.
    pub limiting_power: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
    pub assumptions: AssumptionView,
}

impl AnalysisReport {
    pub fn new(scenario: &Scenario) -> Result<Self, GraphError> {
        let p = scenario.partition();
        let spectral = scenario.spectral()?;
        let has_receivers = p.n_receiving() > 0;
        Ok(Self {
            scenario: scenario.name.clone(),
            n_agents: scenario.n_agents(),
            sending_blocks: p.sending_blocks().iter().map(|b| one_based(b)).collect(),
            receiving_blocks: p.receiving_blocks().iter().map(|b| one_based(b)).collect(),
            perron_vectors: spectral
                .perron_vectors
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
            receiving_radii: spectral.receiving_radii.clone(),
            sending_agents: one_based(p.sending_agents()),
            receiving_agents: one_based(p.receiving_agents()),
            influence_transpose: has_receivers.then(|| rows(&spectral.influence.transpose())),
            confinement: has_receivers.then(|| rows(&spectral.confinement)),
            limiting_power: rows(&spectral.limiting_power),
            warnings: p.warnings().to_vec(),
            assumptions: AssumptionView::new(scenario, &scenario.check_assumptions()),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} ({} agents)", self.scenario, self.n_agents)?;
        writeln!(f, "sending blocks:   {}", fmt_blocks(&self.sending_blocks))?;
        writeln!(
            f,
            "receiving blocks: {}",
            fmt_blocks(&self.receiving_blocks)
        )?;
        for (b, y) in self.sending_blocks.iter().zip(&self.perron_vectors) {
            writeln!(
                f,
                "perron {}: {}",
                fmt_blocks(std::slice::from_ref(b)),
                fmt_vec(y)
            )?;
        }
        for (b, r) in self.receiving_blocks.iter().zip(&self.receiving_radii) {
            writeln!(
                f,
                "spectral radius {}: {r:.6}",
                fmt_blocks(std::slice::from_ref(b))
            )?;
        }
        match (&self.influence_transpose, &self.confinement) {
            (Some(w), Some(c)) => {
                writeln!(
                    f,
                    "influence W^T (rows: receivers {:?}, columns: senders {:?})",
                    self.receiving_agents, self.sending_agents
                )?;
                for (k, row) in self.receiving_agents.iter().zip(w) {
                    writeln!(f, "  {k:>3}: {}", fmt_vec(row))?;
                }
                writeln!(f, "confinement C:")?;
                for (k, row) in self.receiving_agents.iter().zip(c) {
                    writeln!(f, "  {k:>3}: {}", fmt_vec(row))?;
                }
            }
            _ => writeln!(f, "no receiving agents; influence matrix skipped")?,
        }
        writeln!(f, "limiting power A^inf:")?;
        for (l, row) in self.limiting_power.iter().enumerate() {
            writeln!(f, "  {:>3}: {}", l + 1, fmt_vec(row))?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        writeln!(f, "assumptions:")?;
        write!(f, "{}", self.assumptions)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub agent: usize,
    pub receiving: bool,
    pub truth: String,
    pub limit: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub agent: usize,
    pub half_width: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub raw_lower: Vec<f64>,
    pub raw_upper: Vec<f64>,
}

impl From<&ConfinementBand> for BandRow {
    fn from(b: &ConfinementBand) -> Self {
        Self {
            agent: b.agent + 1,
            half_width: b.half_width,
            lower: b.lower.clone(),
            upper: b.upper.clone(),
            raw_lower: b.raw_lower.clone(),
            raw_upper: b.raw_upper.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub scenario: String,
    pub states: Vec<String>,
    pub rows: Vec<PredictionRow>,
    pub gamma_max: Option<f64>,
    pub bands: Vec<BandRow>,
    pub regime: LimitRegime,
}

impl PredictionReport {
    pub fn new(scenario: &Scenario, gamma_max: Option<f64>) -> Result<Self, GraphError> {
        let prediction = scenario.prediction()?;
        let names = scenario.space().names();
        let receiving = scenario.partition().receiving_agents();
        let rows = (0..scenario.n_agents())
            .map(|k| PredictionRow {
                agent: k + 1,
                receiving: receiving.contains(&k),
                truth: names[scenario.agent_truths()[k]].clone(),
                limit: prediction.agent(k).to_vec(),
            })
            .collect();
        let bands = scenario.bands(gamma_max)?;
        let gamma_max =
            gamma_max.or_else(|| scenario.awareness().map(|a| a.gamma_max_over(receiving)));
        Ok(Self {
            scenario: scenario.name.clone(),
            states: names.to_vec(),
            rows,
            gamma_max,
            bands: bands
                .unwrap_or_default()
                .iter()
                .map(BandRow::from)
                .collect(),
            regime: scenario.check_assumptions().regime,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for PredictionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "scenario {}: limiting beliefs over ({})",
            self.scenario,
            self.states.join(", ")
        )?;
        for r in &self.rows {
            let role = if r.receiving { "receiving" } else { "sending" };
            writeln!(
                f,
                "  agent {:>3} {role:<9} truth {:<8} {}",
                r.agent,
                r.truth,
                fmt_vec(&r.limit)
            )?;
        }
        if let Some(g) = self.gamma_max {
            writeln!(f, "confinement bands (gamma_max = {g}):")?;
            for b in &self.bands {
                writeln!(
                    f,
                    "  agent {:>3} +/- {:.4}: lower {} upper {}",
                    b.agent,
                    b.half_width,
                    fmt_vec(&b.lower),
                    fmt_vec(&b.upper)
                )?;
            }
        }
        if self.regime == LimitRegime::Unpredicted {
            writeln!(
                f,
                "note: assumptions fail; receivers need not converge to these values"
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRow {
    pub agent: usize,
    pub predicted: Vec<f64>,
    pub empirical: Vec<f64>,
    pub deviation: f64,
    pub inside_band: Option<bool>,
    pub oscillation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub regime: LimitRegime,
    pub model: crate::sim::UpdateModel,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub window: usize,
    pub tol: f64,
    pub rows: Vec<VerificationRow>,
    pub passed: bool,
    /// Reason for failure, naming the worst offender.
    pub failure: Option<String>,
}

impl VerificationReport {
    /// Builds the verdict from a convergence assessment. Total-influence
    /// scenarios are judged by deviation, confined ones by band membership,
    /// and unpredicted ones always fail.
    pub fn new(
        scenario: &Scenario,
        regime: LimitRegime,
        config: &crate::sim::SimulationConfig,
        tol: f64,
        report: &ConvergenceReport,
    ) -> Self {
        let rows: Vec<VerificationRow> = report
            .agents
            .iter()
            .map(|a| VerificationRow {
                agent: a.agent + 1,
                predicted: a.predicted.clone(),
                empirical: a.empirical.clone(),
                deviation: a.max_deviation,
                inside_band: a.inside_band,
                oscillation: a.oscillation,
                pass: match regime {
                    LimitRegime::TotalInfluence => a.max_deviation <= tol,
                    LimitRegime::Confined => a.inside_band == Some(true),
                    LimitRegime::Unpredicted => false,
                },
            })
            .collect();
        let failure = match regime {
            LimitRegime::Unpredicted => {
                Some("assumptions fail, so there is no fixed limit to verify".to_string())
            }
            LimitRegime::TotalInfluence => {
                report.worst().filter(|a| a.max_deviation > tol).map(|a| {
                    format!(
                        "agent {} deviates by {:.4} > {tol}",
                        a.agent + 1,
                        a.max_deviation
                    )
                })
            }
            LimitRegime::Confined => report
                .band_violations()
                .max_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation))
                .map(|a| format!("agent {} leaves its confinement band", a.agent + 1)),
        };
        Self {
            scenario: scenario.name.clone(),
            regime,
            model: config.model,
            steps: config.steps,
            trials: config.trials,
            seed: config.base_seed,
            window: report.window,
            tol,
            passed: failure.is_none(),
            rows,
            failure,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut header = String::new();
        let _ = write!(
            header,
            "scenario {}: {} steps, {} trial(s), seed {}, window {}",
            self.scenario, self.steps, self.trials, self.seed, self.window
        );
        writeln!(f, "{header}")?;
        writeln!(
            f,
            "  agent  predicted                 empirical                 deviation  band"
        )?;
        for r in &self.rows {
            let band = match r.inside_band {
                Some(true) => "inside",
                Some(false) => "OUTSIDE",
                None => "-",
            };
            writeln!(
                f,
                "  {:>5}  {:<24}  {:<24}  {:>9.5}  {band}{}",
                r.agent,
                fmt_vec(&r.predicted),
                fmt_vec(&r.empirical),
                r.deviation,
                if r.pass { "" } else { "  FAIL" }
            )?;
        }
        match &self.failure {
            None => writeln!(f, "verification passed"),
            Some(why) => writeln!(f, "verification FAILED: {why}"),
        }
    }
}
