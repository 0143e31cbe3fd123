//! Closed-form detection thresholds next to the game-engine root finder.

use mdiew::noise::{NoiseSpec, PauliIndexSet};
use mdiew::thresholds::{
    amplitude_damping_threshold, memory_threshold, numeric_threshold, pauli_threshold, white_noise_threshold,
    SumConvention, ThresholdResult,
};

fn row(label: &str, closed: ThresholdResult, noise: &NoiseSpec) -> mdiew::Result<()> {
    let numeric = numeric_threshold(noise)?;
    println!("{label:<36} {:>12.9} {:>12.9} {:>6}", closed.v_star, numeric.v_star, closed.detectable);
    Ok(())
}

fn main() -> mdiew::Result<()> {
    println!("{:<36} {:>12} {:>12} {:>6}", "noise", "closed", "numeric", "det.");
    row("white (0.9, 0.8)", white_noise_threshold(0.9, 0.8)?, &NoiseSpec::WhiteNoise { p1: 0.9, p2: 0.8 })?;
    let flip = |i, j, p1, p2| NoiseSpec::PauliFlip { i, j, p1, p2 };
    row("pauli same (0.2, 0.1)", pauli_threshold(3, 3, 0.2, 0.1)?, &flip(3, 3, 0.2, 0.1))?;
    row("pauli same (0.3, 0.8)", pauli_threshold(3, 3, 0.3, 0.8)?, &flip(3, 3, 0.3, 0.8))?;
    row("pauli different (0.9, 0.7)", pauli_threshold(1, 2, 0.9, 0.7)?, &flip(1, 2, 0.9, 0.7))?;
    row(
        "amplitude damping (0.5, 0.5)",
        amplitude_damping_threshold(0.5, 0.5)?,
        &NoiseSpec::AmplitudeDamping { eps1: 0.5, eps2: 0.5 },
    )?;

    println!("\nmemory channel, probs (0.5, 0.3, 0.2):");
    let probs = [0.5, 0.3, 0.2];
    for m in [0.0, 0.5, 1.0] {
        let noise = NoiseSpec::CorrelatedPauli {
            m,
            probs: probs.to_vec(),
            index_set: PauliIndexSet::Flips,
        };
        print!("  m = {m}: numeric {:.9}", numeric_threshold(&noise)?.v_star);
        for conv in SumConvention::ALL {
            print!(", {conv:?} {:.9}", memory_threshold(m, &probs, conv)?.v_star);
        }
        println!();
    }
    Ok(())
}
