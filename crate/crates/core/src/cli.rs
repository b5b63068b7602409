//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 verification failure,
//! 3 I/O error. A scenario argument is a path or a bundled fixture name; see
//! [`crate::scenario::fixtures::resolve`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::graph::GraphError;
use crate::scenario::{
    self, fixtures, AnalysisReport, PredictionReport, Scenario, ScenarioError, VerificationReport,
};
use crate::sim::{self, SimError, SimulationConfig, UpdateModel};

#[derive(Debug, Parser)]
#[command(
    name = "influence",
    version,
    about = "Influence analysis and social-learning simulation"
)]
pub struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition, spectral objects, influence and confinement matrices, assumption checks.
    Analyze {
        scenario: String,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form limiting beliefs, with bands when awareness factors are known.
    Predict {
        scenario: String,
        /// Overrides the awareness bound used for the bands.
        #[arg(long)]
        gamma_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the learning dynamics and writes a CSV trace.
    Simulate {
        scenario: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// CSV trace destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record forecasts, regrets and forecast KL in the trace.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Simulates and checks receivers against the prediction.
    Verify {
        scenario: String,
        #[command(flatten)]
        run: RunArgs,
        /// Allowed window-mean deviation for total-influence scenarios.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        /// Trailing window in steps; defaults to the last 10% (at least 100).
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Update rule; defaults to self-aware when the scenario has awareness factors.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, default_value_t = 7000, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Diffusion,
    SelfAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Success = 0,
    Invalid = 1,
    VerificationFailed = 2,
    Io = 3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub exit: ExitKind,
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
}

impl CommandOutcome {
    fn ok(summary: String) -> Self {
        Self {
            exit: ExitKind::Success,
            summary,
            artifacts: Vec::new(),
        }
    }

    fn fail(exit: ExitKind, summary: impl Into<String>) -> Self {
        Self {
            exit,
            summary: summary.into(),
            artifacts: Vec::new(),
        }
    }

    pub fn code(&self) -> u8 {
        self.exit as u8
    }
}

impl From<ScenarioError> for CommandOutcome {
    fn from(e: ScenarioError) -> Self {
        let exit = match e {
            ScenarioError::Io { .. } | ScenarioError::Csv(_) => ExitKind::Io,
            _ => ExitKind::Invalid,
        };
        Self::fail(exit, format!("error: {e}"))
    }
}

impl From<GraphError> for CommandOutcome {
    fn from(e: GraphError) -> Self {
        Self::fail(ExitKind::Invalid, format!("error: {e}"))
    }
}

impl From<SimError> for CommandOutcome {
    fn from(e: SimError) -> Self {
        Self::fail(ExitKind::Invalid, format!("error: {e}"))
    }
}

fn model_for(arg: Option<ModelArg>, scenario: &Scenario) -> UpdateModel {
    match arg {
        Some(ModelArg::Diffusion) => UpdateModel::Diffusion,
        Some(ModelArg::SelfAware) => UpdateModel::SelfAware,
        None if scenario.awareness().is_some() => UpdateModel::SelfAware,
        None => UpdateModel::Diffusion,
    }
}

fn config_for(run: &RunArgs, scenario: &Scenario) -> SimulationConfig {
    let mut config = SimulationConfig::new(model_for(run.model, scenario), run.steps as usize);
    config.trials = run.trials as usize;
    config.base_seed = run.seed;
    config.threads = run.threads;
    config
}

fn write_out(outcome: &mut CommandOutcome, out: Option<PathBuf>) {
    let Some(path) = out else { return };
    match std::fs::write(&path, &outcome.summary) {
        Ok(()) => outcome.artifacts.push(path),
        Err(e) => {
            *outcome = CommandOutcome::fail(ExitKind::Io, format!("error: {}: {e}", path.display()))
        }
    }
}

fn render<T: std::fmt::Display>(json: bool, report: &T, to_json: impl Fn(&T) -> String) -> String {
    if json {
        to_json(report) + "\n"
    } else {
        report.to_string()
    }
}

/// Executes a parsed command without touching stdout.
pub fn execute(cli: Cli) -> CommandOutcome {
    match run_command(cli) {
        Ok(outcome) | Err(outcome) => outcome,
    }
}

fn run_command(cli: Cli) -> Result<CommandOutcome, CommandOutcome> {
    let json = cli.json;
    match cli.command {
        Command::Analyze { scenario, out } => {
            let s = fixtures::resolve(&scenario)?;
            let report = AnalysisReport::new(&s)?;
            let mut outcome = CommandOutcome::ok(render(json, &report, AnalysisReport::to_json));
            write_out(&mut outcome, out);
            Ok(outcome)
        }
        Command::Predict {
            scenario,
            gamma_max,
            out,
        } => {
            if let Some(g) = gamma_max {
                if !(0.0..=1.0).contains(&g) {
                    return Err(CommandOutcome::fail(
                        ExitKind::Invalid,
                        format!("error: --gamma-max {g} outside [0, 1]"),
                    ));
                }
            }
            let s = fixtures::resolve(&scenario)?;
            let report = PredictionReport::new(&s, gamma_max)?;
            let mut outcome = CommandOutcome::ok(render(json, &report, PredictionReport::to_json));
            write_out(&mut outcome, out);
            Ok(outcome)
        }
        Command::Simulate {
            scenario,
            run,
            stride,
            out,
            diagnostics,
        } => {
            let s = fixtures::resolve(&scenario)?;
            let mut config = config_for(&run, &s);
            config.record_stride = stride;
            config.record_forecasts = diagnostics;
            config.record_diagnostics = diagnostics;
            let trace = sim::run(&s, &config)?;
            let mut outcome = CommandOutcome::ok(simulation_summary(&s, &trace, json));
            if let Some(path) = out {
                scenario::export_trace(&s, &trace, &path)?;
                outcome.artifacts.push(path);
            }
            Ok(outcome)
        }
        Command::Verify {
            scenario,
            run,
            tol,
            window,
            out,
        } => {
            let s = fixtures::resolve(&scenario)?;
            let regime = s.check_assumptions().regime;
            let config = config_for(&run, &s);
            let prediction = s.prediction()?;
            let bands = match config.model {
                UpdateModel::SelfAware => s.bands(None)?,
                UpdateModel::Diffusion => None,
            };
            let trace = sim::run(&s, &config)?;
            let window = window.unwrap_or_else(|| sim::default_window(config.steps));
            let assessed = sim::assess(&trace, &prediction, bands.as_deref(), window)?;
            let report = VerificationReport::new(&s, regime, &config, tol, &assessed);
            let mut outcome =
                CommandOutcome::ok(render(json, &report, VerificationReport::to_json));
            if !report.passed {
                outcome.exit = ExitKind::VerificationFailed;
            }
            write_out(&mut outcome, out);
            Ok(outcome)
        }
    }
}

fn simulation_summary(s: &Scenario, trace: &sim::SimulationTrace, json: bool) -> String {
    let n = s.n_agents();
    let m = s.space().len();
    let trials = trace.trials.len() as f64;
    let mean: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..m)
                .map(|t| {
                    trace
                        .trials
                        .iter()
                        .map(|tr| tr.last().agent(k)[t])
                        .sum::<f64>()
                        / trials
                })
                .collect()
        })
        .collect();
    let steps = trace.config.steps;
    if json {
        let value = serde_json::json!({
            "scenario": s.name,
            "model": trace.config.model,
            "steps": steps,
            "trials": trace.trials.len(),
            "seed": trace.config.base_seed,
            "states": s.space().names(),
            "final_mean_beliefs": mean,
        });
        return serde_json::to_string_pretty(&value).expect("summary serializes") + "\n";
    }
    let mut text = format!(
        "scenario {}: {} trial(s) of {steps} steps, seed {}\nfinal beliefs (trial mean) over ({}):\n",
        s.name,
        trace.trials.len(),
        trace.config.base_seed,
        s.space().names().join(", ")
    );
    for (k, row) in mean.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.4}")).collect();
        text.push_str(&format!("  agent {:>3}: ({})\n", k + 1, cells.join(", ")));
    }
    text
}

/// Parses `args` (including the program name) and executes the command.
pub fn run_args<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let exit = if e.use_stderr() {
                ExitKind::Invalid
            } else {
                ExitKind::Success
            };
            CommandOutcome::fail(exit, e.render().to_string())
        }
    }
}

/// Entry point for the binary: prints the outcome and maps it to an exit code.
pub fn main_with_args<I, T>(args: I) -> std::process::ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = run_args(args);
    let text = outcome.summary.as_bytes();
    let _ = match outcome.exit {
        ExitKind::Success | ExitKind::VerificationFailed => std::io::stdout().write_all(text),
        _ => std::io::stderr().write_all(text),
    };
    if outcome.exit == ExitKind::VerificationFailed {
        let _ = writeln!(std::io::stderr(), "verification failed");
    }
    std::process::ExitCode::from(outcome.code())
}
