//! Self-aware agents whose own observations contradict the senders: the
//! receivers no longer reach the closed-form point but stay in its bands.
//!
//! ```bash
//! cargo run --release --example self_aware_confinement
//! ```

use influence::scenario::{fixtures, LimitRegime};
use influence::sim::{self, SimulationConfig, UpdateModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = fixtures::load("fig6_caseB")?;
    assert_eq!(scenario.check_assumptions().regime, LimitRegime::Confined);

    let bands = scenario
        .bands(None)?
        .expect("scenario has awareness factors");
    let trace = sim::run(
        &scenario,
        &SimulationConfig::new(UpdateModel::SelfAware, 7000),
    )?;
    let report = sim::assess(&trace, &scenario.prediction()?, Some(&bands), 700)?;

    for (a, b) in report.agents.iter().zip(&bands) {
        println!(
            "agent {}: mean {:.4?} in [{:.4?}, {:.4?}] -> {}",
            a.agent + 1,
            a.empirical,
            b.raw_lower,
            b.raw_upper,
            if a.inside_band == Some(true) {
                "inside"
            } else {
                "OUTSIDE"
            }
        );
    }
    Ok(())
}
