//! Learning-progress functionals: regrets, aggregate risk, forecast error and
//! the bounded perturbation term of the self-aware update.
//!
//! Natural logarithms throughout, with `0 log 0 = 0`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::beliefs::AgentLikelihood;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagError {
    #[error("regret undefined: belief puts no mass on the reference states")]
    UndefinedRegret,

    #[error("forecast assigns zero probability to signal {} that the truth can emit", .signal + 1)]
    UndefinedKL { signal: usize },

    #[error("observed signal has zero probability under the belief")]
    ZeroEvidence,

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, DiagError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    RegretWeak,
    RegretTrue,
    AggregateRisk,
    ForecastKl,
    HValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticValue {
    pub kind: DiagnosticKind,
    pub value: f64,
    pub agent: usize,
    pub time: usize,
}

/// `-log sum_{theta in true_set} mu(theta)`.
pub fn regret_weak(belief: &[f64], true_set: &BTreeSet<usize>) -> Result<f64> {
    let mass: f64 = true_set.iter().map(|&t| belief[t]).sum();
    if mass <= 0.0 {
        return Err(DiagError::UndefinedRegret);
    }
    Ok((-mass.ln()).max(0.0))
}

/// `-log mu(truth)`.
pub fn regret_true(belief: &[f64], truth: usize) -> Result<f64> {
    let mass = belief[truth];
    if mass <= 0.0 {
        return Err(DiagError::UndefinedRegret);
    }
    Ok((-mass.ln()).max(0.0))
}

/// Perron-weighted sum of per-agent regrets.
pub fn aggregate_risk(regrets: &[f64], perron: &[f64]) -> f64 {
    regrets.iter().zip(perron).map(|(r, y)| r * y).sum()
}

/// `D_KL(L(. | truth) || m)` where `m` is the forecast induced by `belief`.
pub fn forecast_kl(likelihood: &AgentLikelihood, belief: &[f64], truth: usize) -> Result<f64> {
    let m = crate::beliefs::forecast(belief, likelihood);
    let mut kl = 0.0;
    for (zeta, (&p, &q)) in likelihood.row(truth).iter().zip(&m).enumerate() {
        if p == 0.0 {
            continue;
        }
        if q <= 0.0 {
            return Err(DiagError::UndefinedKL { signal: zeta });
        }
        kl += p * (p / q).ln();
    }
    Ok(kl.max(0.0))
}

/// `tau mu(theta) (L(zeta|theta) / sum_theta' mu(theta') L(zeta|theta') - 1)`.
///
/// Always in `[-1, 1]` for valid inputs.
pub fn h_value(
    likelihood: &AgentLikelihood,
    belief: &[f64],
    state: usize,
    signal: usize,
    tau: f64,
) -> Result<f64> {
    let column = likelihood.column(signal);
    if column.len() != belief.len() {
        return Err(DiagError::Dimension(
            "belief and likelihood lengths differ".into(),
        ));
    }
    let evidence: f64 = belief.iter().zip(&column).map(|(m, l)| m * l).sum();
    if evidence <= 0.0 {
        return Err(DiagError::ZeroEvidence);
    }
    Ok(tau * belief[state] * (column[state] / evidence - 1.0))
}

/// Trial-average estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub standard_error: f64,
}

impl Estimate {
    /// Sample mean and `s / sqrt(n)`; the error is zero for a single sample.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return Self {
                mean,
                standard_error: 0.0,
            };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            standard_error: (var / n).sqrt(),
        }
    }
}

/// A recorded step where the Monte Carlo risk rose by more than the allowed
/// noise relative to `lag` steps earlier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskIncrease {
    pub time: usize,
    pub earlier: usize,
    pub increase: f64,
    pub standard_error: f64,
}

/// Checks `J(i) <= J(i - lag) + z * SE` at every recorded time `i` that has a
/// recorded partner `i - lag`.
///
/// `samples[t][trial]` holds the risk of one trial at `times[t]`. The
/// standard error is that of the per-trial paired difference.
pub fn risk_increases(
    times: &[usize],
    samples: &[Vec<f64>],
    lag: usize,
    z: f64,
) -> Vec<RiskIncrease> {
    let mut out = Vec::new();
    for (t, &time) in times.iter().enumerate() {
        let Some(earlier) = time.checked_sub(lag) else {
            continue;
        };
        let Some(e) = times.iter().position(|&x| x == earlier) else {
            continue;
        };
        let diffs: Vec<f64> = samples[t]
            .iter()
            .zip(&samples[e])
            .map(|(a, b)| a - b)
            .collect();
        let est = Estimate::from_samples(&diffs);
        if est.mean > z * est.standard_error {
            out.push(RiskIncrease {
                time,
                earlier,
                increase: est.mean,
                standard_error: est.standard_error,
            });
        }
    }
    out
}
