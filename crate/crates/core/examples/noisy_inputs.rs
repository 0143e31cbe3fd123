//! Noisy MDI values of Werner states and the modified witness for each
//! uniform noise family.

use mdiew::game::{modified_witness, noisy_mdi_value, GameSetup};
use mdiew::noise::NoiseSpec;
use mdiew::states::werner_state;
use mdiew::witness::{expectation, werner_decomposition};

fn main() -> mdiew::Result<()> {
    let decomp = werner_decomposition();
    let rho = werner_state(0.9)?;
    let setup = GameSetup::bell(decomp.clone(), rho.clone())?;
    for noise in NoiseSpec::uniform_catalog() {
        let value = noisy_mdi_value(&setup, &noise)?;
        let w_mod = modified_witness(&decomp, &noise)?;
        println!(
            "{:<20} I = {:>10.6}   Tr(W' rho)/4 = {:>10.6}",
            noise.kind_name(),
            value,
            expectation(&w_mod, &rho)? / 4.0
        );
    }
    println!("{}", serde_json::to_string_pretty(&NoiseSpec::WhiteNoise { p1: 0.9, p2: 0.8 })?);
    Ok(())
}
