//! A receiver that can tell its own truth from the senders' truths never
//! settles: its belief keeps oscillating between the two pulls.
//!
//! ```bash
//! cargo run --release --example non_convergence
//! ```

use influence::scenario::fixtures;
use influence::sim::{self, SimulationConfig, UpdateModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = fixtures::load("three_agent_violated")?;
    for check in &scenario.check_assumptions().receiving {
        println!(
            "agent {} distinguishes sending truths {:?}",
            check.agent + 1,
            check.missing
        );
    }

    let trace = sim::run(
        &scenario,
        &SimulationConfig::new(UpdateModel::Diffusion, 20_000),
    )?;
    let report = sim::assess(&trace, &scenario.prediction()?, None, 1000)?;
    let agent = &report.agents[0];
    println!("window mean     {:.4?}", agent.empirical);
    println!("window variance {:.2e}", agent.oscillation);

    let last = &trace.trials[0].beliefs;
    for t in (19_990..=20_000).step_by(2) {
        println!("step {t}: {:.3?}", last[t].agent(2));
    }
    Ok(())
}
