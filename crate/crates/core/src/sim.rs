//! Seeded Monte Carlo engine for the diffusion and self-aware learning rules.
//!
//! Each step is synchronous: every agent draws a private signal and forms
//! its intermediate belief, then every agent combines its neighbors'
//! intermediates. Trial `t` owns a `ChaCha20Rng` seeded with
//! `seed_from_u64(base_seed)` on stream `t`, so a trial's trajectory depends
//! only on `(scenario, config, t)`, never on scheduling or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::beliefs::{
    bayesian_update, diffusion_combine, forecast, self_aware_intermediate, AgentLikelihood,
    AwarenessSchedule, BeliefError, BeliefState, LikelihoodModel,
};
use crate::diag;
use crate::graph::CombinationMatrix;
use crate::predict::{ConfinementBand, LimitPrediction};
use crate::scenario::Scenario;

/// Beliefs below this are flushed to zero after each combine.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error("self-aware model requires an awareness schedule")]
    MissingAwareness,

    #[error("trial {trial}: agent {} observed an impossible signal at step {time}", .agent + 1)]
    ZeroEvidence {
        trial: usize,
        agent: usize,
        time: usize,
    },

    #[error("window of {window} steps exceeds the {recorded} recorded steps")]
    WindowTooLong { window: usize, recorded: usize },

    #[error(transparent)]
    Belief(#[from] BeliefError),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateModel {
    /// Bayesian intermediate update followed by the combine step.
    Diffusion,
    /// Convex mix of prior and Bayesian posterior, then combine.
    SelfAware,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub model: UpdateModel,
    pub steps: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub record_stride: usize,
    /// Worker threads for the trial loop; `None` uses rayon's global pool.
    pub threads: Option<usize>,
    pub record_forecasts: bool,
    pub record_diagnostics: bool,
}

impl SimulationConfig {
    pub fn new(model: UpdateModel, steps: usize) -> Self {
        Self {
            model,
            steps,
            trials: 1,
            base_seed: 1,
            record_stride: 1,
            threads: None,
            record_forecasts: false,
            record_diagnostics: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(SimError::Config("record stride must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(SimError::Config("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Generator for trial `trial` of a run seeded with `base_seed`.
pub fn trial_rng(base_seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(base_seed);
    rng.set_stream(trial as u64);
    rng
}

/// Categorical draw from `L(. | truth)`.
pub fn sample_signal<R: Rng + ?Sized>(
    likelihood: &AgentLikelihood,
    truth: usize,
    rng: &mut R,
) -> usize {
    let row = likelihood.row(truth);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (zeta, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return zeta;
        }
    }
    // u landed in the rounding gap above the cumulative sum
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Which intermediate update the agents run.
#[derive(Debug, Clone, Copy)]
pub enum UpdateRule<'a> {
    Diffusion,
    SelfAware(&'a AwarenessSchedule),
}

/// Intermediate beliefs `psi_i` for step `time` given `mu_{i-1}` and the signals.
///
/// On zero evidence the returned error carries trial `0`; [`run`] fills in
/// the actual trial.
pub fn intermediate(
    beliefs: &BeliefState,
    signals: &[usize],
    models: &LikelihoodModel,
    rule: UpdateRule<'_>,
    time: usize,
) -> Result<BeliefState> {
    let rows = (0..beliefs.n_agents())
        .map(|k| {
            let lik = models.agent(k).column(signals[k]);
            let prior = beliefs.agent(k);
            let out = match rule {
                UpdateRule::Diffusion => bayesian_update(prior, &lik),
                UpdateRule::SelfAware(schedule) => {
                    self_aware_intermediate(prior, &lik, schedule.gamma(k, time))
                }
            };
            out.map_err(|e| match e {
                BeliefError::ZeroEvidence => SimError::ZeroEvidence {
                    trial: 0,
                    agent: k,
                    time,
                },
                other => other.into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BeliefState::from_rows_unchecked(rows))
}

fn flush_underflow(state: BeliefState) -> BeliefState {
    let rows = state
        .rows()
        .iter()
        .map(|row| {
            if row.iter().any(|&x| x != 0.0 && x < UNDERFLOW) {
                let mut row: Vec<f64> = row
                    .iter()
                    .map(|&x| if x < UNDERFLOW { 0.0 } else { x })
                    .collect();
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x /= s);
                row
            } else {
                row.clone()
            }
        })
        .collect();
    BeliefState::from_rows_unchecked(rows)
}

/// One synchronous round: intermediate update for every agent, then combine.
pub fn step(
    beliefs: &BeliefState,
    signals: &[usize],
    matrix: &CombinationMatrix,
    models: &LikelihoodModel,
    rule: UpdateRule<'_>,
    time: usize,
) -> Result<BeliefState> {
    let psi = intermediate(beliefs, signals, models, rule, time)?;
    Ok(flush_underflow(diffusion_combine(&psi, matrix)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialSeed {
    pub base_seed: u64,
    pub stream: u64,
}

/// Per-agent functionals recorded alongside beliefs. Undefined values
/// (zero mass on the reference states) are stored as `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentDiagnostics {
    pub regret_weak: f64,
    pub regret_true: f64,
    pub forecast_kl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialTrace {
    pub trial: usize,
    pub seed: TrialSeed,
    pub times: Vec<usize>,
    pub beliefs: Vec<BeliefState>,
    /// `forecasts[t][k][zeta]`.
    pub forecasts: Option<Vec<Vec<Vec<f64>>>>,
    /// `diagnostics[t][k]`.
    pub diagnostics: Option<Vec<Vec<AgentDiagnostics>>>,
}

impl TrialTrace {
    pub fn last(&self) -> &BeliefState {
        self.beliefs.last().expect("trace records the priors")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationTrace {
    pub config: SimulationConfig,
    pub trials: Vec<TrialTrace>,
}

impl SimulationTrace {
    pub fn times(&self) -> &[usize] {
        &self.trials[0].times
    }
}

struct Recorder<'a> {
    scenario: &'a Scenario,
    forecasts: bool,
    diagnostics: bool,
}

impl Recorder<'_> {
    fn forecasts(&self, state: &BeliefState) -> Vec<Vec<f64>> {
        (0..state.n_agents())
            .map(|k| forecast(state.agent(k), self.scenario.models().agent(k)))
            .collect()
    }

    fn diagnostics(&self, state: &BeliefState) -> Vec<AgentDiagnostics> {
        let s = self.scenario;
        let support = s.truth().sending_states();
        (0..state.n_agents())
            .map(|k| {
                let mu = state.agent(k);
                let truth = s.agent_truths()[k];
                AgentDiagnostics {
                    regret_weak: diag::regret_weak(mu, &support).unwrap_or(f64::INFINITY),
                    regret_true: diag::regret_true(mu, truth).unwrap_or(f64::INFINITY),
                    forecast_kl: diag::forecast_kl(s.models().agent(k), mu, truth)
                        .unwrap_or(f64::INFINITY),
                }
            })
            .collect()
    }
}

fn run_trial(scenario: &Scenario, config: &SimulationConfig, trial: usize) -> Result<TrialTrace> {
    let rule = match config.model {
        UpdateModel::Diffusion => UpdateRule::Diffusion,
        UpdateModel::SelfAware => {
            UpdateRule::SelfAware(scenario.awareness().ok_or(SimError::MissingAwareness)?)
        }
    };
    let recorder = Recorder {
        scenario,
        forecasts: config.record_forecasts,
        diagnostics: config.record_diagnostics,
    };
    let mut rng = trial_rng(config.base_seed, trial);
    let models = scenario.models();
    let truths = scenario.agent_truths();
    let n = scenario.matrix().n_agents();

    let capacity = config.steps / config.record_stride + 1;
    let mut times = Vec::with_capacity(capacity);
    let mut beliefs = Vec::with_capacity(capacity);
    let mut forecasts = recorder.forecasts.then(Vec::new);
    let mut diagnostics = recorder.diagnostics.then(Vec::new);

    let mut state = scenario.priors().clone();
    let mut record = |time: usize, state: &BeliefState| {
        times.push(time);
        if let Some(f) = forecasts.as_mut() {
            f.push(recorder.forecasts(state));
        }
        if let Some(d) = diagnostics.as_mut() {
            d.push(recorder.diagnostics(state));
        }
        beliefs.push(state.clone());
    };
    record(0, &state);

    let mut signals = vec![0; n];
    for time in 1..=config.steps {
        for (k, signal) in signals.iter_mut().enumerate() {
            *signal = sample_signal(models.agent(k), truths[k], &mut rng);
        }
        state =
            step(&state, &signals, scenario.matrix(), models, rule, time).map_err(|e| match e {
                SimError::ZeroEvidence { agent, time, .. } => {
                    SimError::ZeroEvidence { trial, agent, time }
                }
                other => other,
            })?;
        if time % config.record_stride == 0 {
            record(time, &state);
        }
    }

    Ok(TrialTrace {
        trial,
        seed: TrialSeed {
            base_seed: config.base_seed,
            stream: trial as u64,
        },
        times,
        beliefs,
        forecasts,
        diagnostics,
    })
}

/// Runs every trial of `config` on `scenario`.
pub fn run(scenario: &Scenario, config: &SimulationConfig) -> Result<SimulationTrace> {
    config.validate()?;
    if config.model == UpdateModel::SelfAware && scenario.awareness().is_none() {
        return Err(SimError::MissingAwareness);
    }
    let go = || -> Result<Vec<TrialTrace>> {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(scenario, config, t))
            .collect()
    };
    let trials = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::ThreadPool(e.to_string()))?
            .install(go)?,
        None => go()?,
    };
    Ok(SimulationTrace {
        config: config.clone(),
        trials,
    })
}

/// Last 10% of the run, at least 100 steps, never more than the run.
pub fn default_window(steps: usize) -> usize {
    (steps / 10).max(100).min(steps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentConvergence {
    pub agent: usize,
    /// Mean over the window and over trials.
    pub empirical: Vec<f64>,
    pub predicted: Vec<f64>,
    pub max_deviation: f64,
    /// `Some` only when bands were supplied.
    pub inside_band: Option<bool>,
    /// Per-state sample variance over the window, averaged over trials.
    pub variance: Vec<f64>,
    /// Largest entry of `variance`.
    pub oscillation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub window: usize,
    pub samples: usize,
    pub agents: Vec<AgentConvergence>,
}

impl ConvergenceReport {
    /// Agent with the largest deviation from its prediction.
    pub fn worst(&self) -> Option<&AgentConvergence> {
        self.agents
            .iter()
            .max_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation))
    }

    pub fn max_deviation(&self) -> f64 {
        self.worst().map_or(0.0, |a| a.max_deviation)
    }

    pub fn band_violations(&self) -> impl Iterator<Item = &AgentConvergence> {
        self.agents.iter().filter(|a| a.inside_band == Some(false))
    }
}

/// Compares the trailing `window` steps of every trial against the
/// prediction for each receiving agent.
pub fn assess(
    trace: &SimulationTrace,
    prediction: &LimitPrediction,
    bands: Option<&[ConfinementBand]>,
    window: usize,
) -> Result<ConvergenceReport> {
    let times = trace.times();
    let last = *times.last().expect("trace records the priors");
    if window == 0 || window > last {
        return Err(SimError::WindowTooLong {
            window,
            recorded: last,
        });
    }
    let start = times.partition_point(|&t| t <= last - window);
    let samples = times.len() - start;
    let n_trials = trace.trials.len() as f64;

    let agents = prediction
        .receiving_agents()
        .iter()
        .map(|&k| {
            let m = prediction.agent(k).len();
            let mut empirical = vec![0.0; m];
            let mut variance = vec![0.0; m];
            for trial in &trace.trials {
                for theta in 0..m {
                    let xs: Vec<f64> = trial.beliefs[start..]
                        .iter()
                        .map(|b| b.agent(k)[theta])
                        .collect();
                    let est = diag::Estimate::from_samples(&xs);
                    empirical[theta] += est.mean / n_trials;
                    let var = if xs.len() > 1 {
                        xs.iter().map(|x| (x - est.mean).powi(2)).sum::<f64>()
                            / (xs.len() - 1) as f64
                    } else {
                        0.0
                    };
                    variance[theta] += var / n_trials;
                }
            }
            let predicted = prediction.agent(k).to_vec();
            let max_deviation = empirical
                .iter()
                .zip(&predicted)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let inside_band = bands.map(|bands| {
                bands
                    .iter()
                    .find(|b| b.agent == k)
                    .is_some_and(|b| b.contains(&empirical))
            });
            AgentConvergence {
                agent: k,
                oscillation: variance.iter().copied().fold(0.0, f64::max),
                empirical,
                predicted,
                max_deviation,
                inside_band,
                variance,
            }
        })
        .collect();

    Ok(ConvergenceReport {
        window,
        samples,
        agents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::fixtures;

    fn binary(heads: f64) -> AgentLikelihood {
        AgentLikelihood::new(
            0,
            vec!["H".into(), "T".into()],
            vec![vec![heads, 1.0 - heads]],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_row_always_first_signal() {
        let l = binary(1.0);
        let mut rng = trial_rng(3, 0);
        assert!((0..1000).all(|_| sample_signal(&l, 0, &mut rng) == 0));
    }

    #[test]
    fn fair_coin_frequency() {
        let l = binary(0.5);
        let mut rng = trial_rng(11, 0);
        let heads = (0..100_000)
            .filter(|_| sample_signal(&l, 0, &mut rng) == 0)
            .count();
        let freq = heads as f64 / 1e5;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn streams_differ_between_trials() {
        let a: u64 = trial_rng(1, 0).random();
        let b: u64 = trial_rng(1, 1).random();
        assert_ne!(a, b);
        let again: u64 = trial_rng(1, 0).random();
        assert_eq!(a, again);
    }

    #[test]
    fn uninformative_identity_is_fixed_point() {
        let a = CombinationMatrix::new(nalgebra::DMatrix::identity(2, 2)).unwrap();
        let flat = AgentLikelihood::new(
            0,
            vec!["H".into(), "T".into()],
            vec![vec![0.3, 0.7], vec![0.3, 0.7]],
        )
        .unwrap();
        let models = LikelihoodModel::new(2, vec![flat.clone(), flat]).unwrap();
        let mu = BeliefState::new(vec![vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let next = step(&mu, &[0, 1], &a, &models, UpdateRule::Diffusion, 1).unwrap();
        for k in 0..2 {
            for t in 0..2 {
                assert!((next.agent(k)[t] - mu.agent(k)[t]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_gamma_is_pure_mixing() {
        let s = fixtures::load("fig6_caseB").unwrap();
        let zero = AwarenessSchedule::Constant(vec![0.0; 8]);
        let rule = UpdateRule::SelfAware(&zero);
        let mut mu = BeliefState::new(
            (0..8)
                .map(|k| {
                    let x = 0.1 + 0.05 * k as f64;
                    vec![x, 0.5 - x / 2.0, 0.5 - x / 2.0]
                })
                .collect(),
        )
        .unwrap();
        let start = mu.clone();
        for time in 1..=5 {
            mu = step(&mu, &[0; 8], s.matrix(), s.models(), rule, time).unwrap();
        }
        // mu_5 = (A^5)^T mu_0 per state slice
        let a5 = s.matrix().weights().pow(5);
        for k in 0..8 {
            for t in 0..3 {
                let expected: f64 = (0..8).map(|l| a5[(l, k)] * start.agent(l)[t]).sum();
                assert!((mu.agent(k)[t] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn three_agent_receiver_follows_linear_recursion() {
        let s = fixtures::load("three_agent").unwrap();
        let mu = s.priors().clone();
        let signals = [0, 1, 0];
        let psi = intermediate(&mu, &signals, s.models(), UpdateRule::Diffusion, 1).unwrap();
        let next = step(
            &mu,
            &signals,
            s.matrix(),
            s.models(),
            UpdateRule::Diffusion,
            1,
        )
        .unwrap();
        for t in 0..3 {
            let expected = 0.1 * psi.agent(0)[t] + 0.2 * psi.agent(1)[t] + 0.7 * mu.agent(2)[t];
            assert!((next.agent(2)[t] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_evidence_reports_agent_and_time() {
        let a = CombinationMatrix::from_rows(&[vec![1.0]]).unwrap();
        let l = AgentLikelihood::new(
            0,
            vec!["H".into(), "T".into()],
            vec![vec![1.0, 0.0], vec![0.5, 0.5]],
        )
        .unwrap();
        let models = LikelihoodModel::new(2, vec![l]).unwrap();
        let mu = BeliefState::new(vec![vec![1.0, 0.0]]).unwrap();
        let err = step(&mu, &[1], &a, &models, UpdateRule::Diffusion, 7).unwrap_err();
        assert_eq!(
            err,
            SimError::ZeroEvidence {
                trial: 0,
                agent: 0,
                time: 7
            }
        );
    }

    #[test]
    fn underflow_is_flushed() {
        let s = flush_underflow(BeliefState::from_rows_unchecked(vec![vec![1e-310, 1.0]]));
        assert_eq!(s.agent(0), [0.0, 1.0]);
    }

    #[test]
    fn priors_only_run() {
        let s = fixtures::load("three_agent").unwrap();
        let trace = run(&s, &SimulationConfig::new(UpdateModel::Diffusion, 0)).unwrap();
        assert_eq!(trace.times(), [0]);
        assert_eq!(&trace.trials[0].beliefs[0], s.priors());
    }

    #[test]
    fn self_aware_without_schedule_rejected() {
        let s = fixtures::load("fig6_caseA").unwrap();
        let err = run(&s, &SimulationConfig::new(UpdateModel::SelfAware, 10)).unwrap_err();
        assert_eq!(err, SimError::MissingAwareness);
    }

    #[test]
    fn config_validation() {
        let s = fixtures::load("three_agent").unwrap();
        let mut c = SimulationConfig::new(UpdateModel::Diffusion, 10);
        c.record_stride = 0;
        assert!(matches!(run(&s, &c), Err(SimError::Config(_))));
        c.record_stride = 1;
        c.trials = 0;
        assert!(matches!(run(&s, &c), Err(SimError::Config(_))));
    }

    #[test]
    fn stride_controls_recorded_times() {
        let s = fixtures::load("three_agent").unwrap();
        let mut c = SimulationConfig::new(UpdateModel::Diffusion, 25);
        c.record_stride = 10;
        let trace = run(&s, &c).unwrap();
        assert_eq!(trace.times(), [0, 10, 20]);
    }

    #[test]
    fn assess_constant_trace() {
        let s = fixtures::load("three_agent").unwrap();
        let prediction = s.prediction().unwrap();
        let q = prediction.agent(2).to_vec();
        let state =
            BeliefState::from_rows_unchecked(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], q]);
        let trace = SimulationTrace {
            config: SimulationConfig::new(UpdateModel::Diffusion, 200),
            trials: vec![TrialTrace {
                trial: 0,
                seed: TrialSeed {
                    base_seed: 1,
                    stream: 0,
                },
                times: (0..=200).collect(),
                beliefs: vec![state; 201],
                forecasts: None,
                diagnostics: None,
            }],
        };
        let report = assess(&trace, &prediction, None, 100).unwrap();
        assert_eq!(report.samples, 100);
        assert!(report.agents[0].max_deviation < 1e-14);
        assert!(report.agents[0].oscillation < 1e-28);
        assert_eq!(report.agents[0].inside_band, None);
        assert!(matches!(
            assess(&trace, &prediction, None, 201),
            Err(SimError::WindowTooLong { .. })
        ));
    }

    #[test]
    fn default_window_rules() {
        assert_eq!(default_window(7000), 700);
        assert_eq!(default_window(500), 100);
        assert_eq!(default_window(40), 40);
    }
}
