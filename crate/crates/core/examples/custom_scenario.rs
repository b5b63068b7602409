//! Define a scenario inline in TOML, check its assumptions, predict and save.
//!
//! ```bash
//! cargo run --example custom_scenario
//! ```

use influence::scenario::Scenario;

const SCENARIO: &str = r#"
name = "chain"
description = "one stubborn sender feeding a two-agent chain"

[network]
dimensions = [3, 3]
weights = [
  [1.0, 0.5, 0.0],
  [0.0, 0.5, 0.4],
  [0.0, 0.0, 0.6],
]

[states]
names = ["rain", "sun"]

[likelihood_matrix]
signals = ["wet", "dry"]

[likelihood_matrix.tables]
wet = [["4/5", "1/2", "1/2"], ["1/5", "1/2", "1/2"]]

[truth]
agents = ["rain", "sun", "sun"]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::from_toml_str(SCENARIO)?;
    println!("regime: {:?}", scenario.check_assumptions().regime);
    let prediction = scenario.prediction()?;
    for k in 0..scenario.n_agents() {
        println!("agent {}: {:?}", k + 1, prediction.agent(k));
    }
    let path = std::env::temp_dir().join("chain.toml");
    scenario.save(&path)?;
    println!("saved canonical form to {}", path.display());
    Ok(())
}
