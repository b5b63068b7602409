//! Run the diffusion rule on the eight-agent scenario and compare the
//! receivers' trailing-window means with the closed form.
//!
//! ```bash
//! cargo run --release --example simulate_total_influence
//! ```

use influence::scenario::fixtures;
use influence::sim::{self, SimulationConfig, UpdateModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = fixtures::load("fig6_caseA")?;
    let mut config = SimulationConfig::new(UpdateModel::Diffusion, 7000);
    config.base_seed = 1;
    let trace = sim::run(&scenario, &config)?;

    let report = sim::assess(
        &trace,
        &scenario.prediction()?,
        None,
        sim::default_window(7000),
    )?;
    for a in &report.agents {
        println!(
            "agent {}: empirical {:.4?} predicted {:.4?} deviation {:.2e}",
            a.agent + 1,
            a.empirical,
            a.predicted,
            a.max_deviation
        );
    }
    Ok(())
}
