//! Partition a network into sending and receiving parts and print the
//! spectral objects that govern the limit.
//!
//! ```bash
//! cargo run --example analyze_network
//! ```

use influence::graph::{classify, CombinationMatrix, SpectralSummary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // weights[l][k] is the weight agent k gives to agent l; columns sum to 1.
    let matrix = CombinationMatrix::from_rows(&[
        vec![1.0, 0.0, 0.1],
        vec![0.0, 1.0, 0.2],
        vec![0.0, 0.0, 0.7],
    ])?;
    let partition = classify(&matrix)?;
    println!("sending blocks:   {:?}", partition.sending_blocks());
    println!("receiving blocks: {:?}", partition.receiving_blocks());
    println!("receiving radii:  {:?}", partition.receiving_radii());

    let spectral = SpectralSummary::compute(&matrix, &partition)?;
    println!("influence W^T = {}", spectral.influence.transpose());
    println!("confinement C = {}", spectral.confinement);
    println!("A^inf = {}", spectral.limiting_power);
    Ok(())
}
