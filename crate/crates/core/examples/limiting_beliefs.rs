//! Closed-form limiting beliefs of the receiving agents in the bundled
//! eight-agent scenario, and the pairwise disagreement they imply.
//!
//! ```bash
//! cargo run --example limiting_beliefs
//! ```

use influence::predict::predicted_social_disagreement;
use influence::scenario::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = fixtures::load("fig6_caseA")?;
    let prediction = scenario.prediction()?;
    let names = scenario.space().names();
    for &k in prediction.receiving_agents() {
        let cells: Vec<String> = names
            .iter()
            .zip(prediction.agent(k))
            .map(|(n, q)| format!("{n}={q:.4}"))
            .collect();
        println!("agent {}: {}", k + 1, cells.join("  "));
    }
    println!(
        "pairwise total-variation disagreement:{:.4}",
        predicted_social_disagreement(&prediction)
    );
    Ok(())
}
