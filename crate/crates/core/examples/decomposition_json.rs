//! Export a witness decomposition to JSON, read it back and check that it
//! still reconstructs the witness.

use mdiew::witness::{verify_decomposition, werner_decomposition, werner_witness, WitnessDecomposition};

fn main() -> mdiew::Result<()> {
    let decomp = werner_decomposition();
    let text = decomp.to_json()?;
    println!("{text}");

    let back = WitnessDecomposition::from_json(&text)?;
    let w = werner_witness();
    println!("reconstruction error (original): {:.3e}", verify_decomposition(&decomp, &w)?);
    println!("reconstruction error (reloaded): {:.3e}", verify_decomposition(&back, &w)?);

    let broken = decomp.with_beta_shift(0, 0, 1e-3)?;
    println!("reconstruction error (beta shifted): {:.3e}", verify_decomposition(&broken, &w)?);
    Ok(())
}
