//! Influence analysis and social learning over weakly-connected directed
//! networks.
//!
//! A left-stochastic combination matrix splits the agents into closed,
//! primitive *sending* blocks and *receiving* agents downstream of them. The
//! receivers' limiting beliefs are fixed in closed form by the influence
//! matrix `W = T_SR (I - T_RR)^-1`, or confined to bands of half-width
//! `gamma_max (C 1)_k` with `C = (I - T_RR^T)^-1` under the self-aware rule.
//! The seeded simulator checks both statements empirically.
//!
//! | module | contents |
//! |---|---|
//! | [`graph`] | validation, SCC partition, Perron vectors, `W`, `C`, `A^inf` |
//! | [`beliefs`] | state spaces, likelihoods, the update rules, identifiability |
//! | [`predict`] | limiting beliefs and confinement bands |
//! | [`sim`] | seeded parallel Monte Carlo runs and convergence assessment |
//! | [`diag`] | regrets, aggregate risk, forecast KL, the `h` term |
//! | [`scenario`] | TOML scenarios, bundled fixtures, CSV traces, reports |
//! | [`cli`] | the `analyze`, `predict`, `simulate` and `verify` commands |
//!
//! Runnable walkthroughs live in `examples/`:
//! `analyze_network`, `limiting_beliefs`, `simulate_total_influence`,
//! `self_aware_confinement`, `non_convergence`, `learning_diagnostics`,
//! `export_trace_csv` and `custom_scenario`.
//!
//! ```
//! use influence::scenario::fixtures;
//!
//! let s = fixtures::load("three_agent").unwrap();
//! let q = s.prediction().unwrap();
//! assert!((q.agent(2)[0] - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod beliefs;
pub mod cli;
pub mod diag;
pub mod graph;
pub mod predict;
pub mod scenario;
pub mod sim;

pub use beliefs::{AgentLikelihood, AwarenessSchedule, BeliefState, LikelihoodModel, StateSpace};
pub use graph::{classify, CombinationMatrix, NetworkPartition, SpectralSummary};
pub use predict::{ConfinementBand, LimitPrediction};
pub use scenario::Scenario;
pub use sim::{SimulationConfig, SimulationTrace, UpdateModel};
