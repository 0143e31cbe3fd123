//! Certify every catalog channel (trace preservation, Choi positivity,
//! adjoint identity) and test whether its adjoint keeps product operators
//! separable. A CNOT conjugation shows what a failure looks like.

use mdiew::noise::{adjoint_channel_preserves_separability, adjoint_preserves_separability, certify_channel, KrausChannel, NoiseSpec};
use mdiew::tensor::ComplexMatrix;

fn main() -> mdiew::Result<()> {
    println!("{:<20} {:>10} {:>11} {:>10} {:>12}", "channel", "TP dev", "Choi min", "adj dev", "worst PT ev");
    for noise in NoiseSpec::uniform_catalog() {
        let cert = certify_channel(&noise.uniform_channel()?, 100, 1)?;
        let sep = adjoint_preserves_separability(&noise, 1000, 1)?;
        println!(
            "{:<20} {:>10.2e} {:>11.2e} {:>10.2e} {:>12.4e}",
            noise.kind_name(),
            cert.trace_preservation,
            cert.choi_min_eigenvalue,
            cert.adjoint_identity,
            sep.worst_pt_eigenvalue
        );
    }

    let cnot = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])?;
    let verdict = adjoint_channel_preserves_separability(&KrausChannel::unitary(cnot)?, 1000, 1)?;
    println!(
        "CNOT conjugation: passed = {}, worst PT eigenvalue = {:.4}",
        verdict.passed, verdict.worst_pt_eigenvalue
    );
    Ok(())
}
