//! The Werner witness, its PPT cross-check and the Bell-projector game.
//!
//! Run with `cargo run --example werner_witness`.

use mdiew::game::{mdi_value, GameSetup};
use mdiew::states::{is_ppt, werner_state};
use mdiew::witness::{expectation, werner_decomposition, werner_witness};

fn main() -> mdiew::Result<()> {
    let w = werner_witness();
    let decomp = werner_decomposition();
    println!("{:>5} {:>10} {:>10} {:>12} {:>5}", "v", "Tr(W rho)", "MDI value", "(1-3v)/16", "PPT");
    for k in 0..=10 {
        let v = k as f64 / 10.0;
        let rho = werner_state(v)?;
        let setup = GameSetup::bell(decomp.clone(), rho.clone())?;
        println!(
            "{v:>5.2} {:>10.6} {:>10.6} {:>12.6} {:>5}",
            expectation(&w, &rho)?,
            mdi_value(&setup)?,
            (1.0 - 3.0 * v) / 16.0,
            is_ppt(&rho)?.ppt
        );
    }
    Ok(())
}
