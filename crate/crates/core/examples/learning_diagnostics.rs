//! Regret, forecast error and the Monte Carlo aggregate risk over many trials
//! on a strongly connected self-aware network.
//!
//! ```bash
//! cargo run --release --example learning_diagnostics
//! ```

use influence::diag::{self, Estimate};
use influence::scenario::fixtures;
use influence::sim::{self, SimulationConfig, UpdateModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = fixtures::load("strong_three")?;
    let spectral = scenario.spectral()?;
    let y: Vec<f64> = spectral.perron_vectors[0].iter().copied().collect();

    let mut config = SimulationConfig::new(UpdateModel::SelfAware, 1000);
    config.trials = 200;
    config.record_stride = 50;
    config.record_diagnostics = true;
    let trace = sim::run(&scenario, &config)?;

    // The single sending block is the whole network, in original order.
    let block = &scenario.partition().sending_blocks()[0];
    let risks: Vec<Vec<f64>> = (0..trace.times().len())
        .map(|t| {
            trace
                .trials
                .iter()
                .map(|trial| {
                    let d = &trial.diagnostics.as_ref().unwrap()[t];
                    let regrets: Vec<f64> = block.iter().map(|&k| d[k].regret_true).collect();
                    diag::aggregate_risk(&regrets, &y)
                })
                .collect()
        })
        .collect();
    for (time, samples) in trace.times().iter().zip(&risks) {
        let j = Estimate::from_samples(samples);
        println!(
            "step {time:>5}: J = {:.5} +/- {:.5}",
            j.mean, j.standard_error
        );
    }
    let rises = diag::risk_increases(trace.times(), &risks, 50, 3.0);
    println!("significant increases: {}", rises.len());
    Ok(())
}
