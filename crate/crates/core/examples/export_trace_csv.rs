//! Write a plot-ready CSV trace with forecasts and diagnostics, then read it
//! back.
//!
//! ```bash
//! cargo run --example export_trace_csv -- /tmp/trace.csv
//! ```

use influence::scenario::{self, fixtures};
use influence::sim::{self, SimulationConfig, UpdateModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "trace.csv".into());
    let scenario = fixtures::load("fig6_caseA")?;

    let mut config = SimulationConfig::new(UpdateModel::Diffusion, 500);
    config.trials = 2;
    config.record_stride = 10;
    config.record_forecasts = true;
    config.record_diagnostics = true;
    let trace = sim::run(&scenario, &config)?;
    scenario::export_trace(&scenario, &trace, &path)?;

    let (header, rows) = scenario::read_trace(std::fs::File::open(&path)?)?;
    println!("{path}: {} rows, columns {}", rows.len(), header.join(","));
    Ok(())
}
