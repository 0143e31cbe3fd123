//! Fake detections: noise on the inputs that drives the MDI functional of a
//! separable state negative.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{effective_mdi_value, noisy_mdi_value, GameSetup, PovmElement};
use crate::noise::NoiseSpec;
use crate::states::{BlochVector, DensityMatrix, PerpConvention, PureQubit};
use crate::tensor::{pauli, ComplexMatrix, DimFactorization};
use crate::witness::werner_decomposition;

/// Agreement required between the closed form and the full game.
pub const EXAMPLE1_AGREEMENT: f64 = 1e-10;

fn product_share() -> DensityMatrix {
    DensityMatrix::maximally_mixed(DimFactorization::qubits(2))
}

/// `−(q²/8) ⟨θ^⊥|ω₃|θ^⊥⟩ Σ_{s=0}^{2} ⟨θ^⊥|τ_s|θ^⊥⟩`.
pub fn example1_closed_form(q: f64, theta: &BlochVector) -> Result<f64> {
    let perp = PureQubit::from_bloch(&theta.neg())?;
    let d = werner_decomposition();
    let bob = perp.expectation(d.omega()[3].op());
    let alice: f64 = d.tau()[..3].iter().map(|tau| perp.expectation(tau.op())).sum();
    Ok(-(q * q / 8.0) * bob * alice)
}

/// The same value from the game engine: Werner decomposition, product
/// shared state, `A₁ = |θ^⊥⟩⟨θ^⊥| ⊗ I` and `B₁ = I ⊗ |θ^⊥⟩⟨θ^⊥|`.
pub fn example1_full_game(q: f64, theta: &BlochVector) -> Result<f64> {
    let proj = PureQubit::from_bloch(&theta.neg())?.projector();
    let id = ComplexMatrix::identity(2);
    let qubits = DimFactorization::qubits(2);
    let alice = PovmElement::new(proj.kron(&id)?, qubits.clone())?;
    let bob = PovmElement::new(id.kron(&proj)?, qubits)?;
    let setup = GameSetup::new(werner_decomposition(), product_share(), alice, bob)?;
    noisy_mdi_value(&setup, &NoiseSpec::example1(q, *theta))
}

/// Example-1 value, computed both ways; they must agree.
pub fn example1_value(q: f64, theta: &BlochVector) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::arg(format!("q = {q} is not in [0, 1]")));
    }
    let closed = example1_closed_form(q, theta)?;
    let full = example1_full_game(q, theta)?;
    if (closed - full).abs() > EXAMPLE1_AGREEMENT {
        return Err(Error::Consistency(format!(
            "closed form {closed:.15} and full game {full:.15} disagree at θ = {:?}",
            theta.components()
        )));
    }
    Ok(full)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Example1Minimum {
    pub value: f64,
    pub theta: BlochVector,
    pub polar: f64,
    pub azimuth: f64,
}

/// Minimum of [`example1_value`] over a polar × azimuthal Bloch grid.
pub fn example1_grid_minimum(q: f64, n_polar: usize, n_azimuth: usize) -> Result<Example1Minimum> {
    if n_polar < 2 || n_azimuth < 1 {
        return Err(Error::arg("θ grid needs at least 2 polar and 1 azimuthal points"));
    }
    let points: Vec<(f64, f64)> = (0..n_polar)
        .flat_map(|i| {
            (0..n_azimuth).map(move |j| (PI * i as f64 / (n_polar - 1) as f64, 2.0 * PI * j as f64 / n_azimuth as f64))
        })
        .collect();
    let values = points
        .par_iter()
        .map(|&(polar, azimuth)| {
            let theta = BlochVector::from_angles(polar, azimuth);
            Ok(Example1Minimum {
                value: example1_value(q, &theta)?,
                theta,
                polar,
                azimuth,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .into_iter()
        .reduce(|best, x| if x.value < best.value { x } else { best })
        .expect("non-empty grid"))
}

/// `A'₁ = (I + σ₂)/2`, `B'₁ = (I − σ₂)/2`.
pub fn example2_effective_povms() -> (PovmElement, PovmElement) {
    let id = ComplexMatrix::identity(2);
    let a = (&id + &pauli(2)).scale_real(0.5);
    let b = (&id - &pauli(2)).scale_real(0.5);
    (
        PovmElement::single(a).expect("projector"),
        PovmElement::single(b).expect("projector"),
    )
}

/// `Σ β_{s,t} Tr[(A'₁ ⊗ B'₁)|χ_st⟩⟨χ_st|]` for the entangling noise.
pub fn example2_value(p: f64, perp: PerpConvention) -> Result<f64> {
    let (a, b) = example2_effective_povms();
    effective_mdi_value(&werner_decomposition(), &a, &b, &NoiseSpec::EntanglingExample2 { p, perp })
}

/// Example 2 through the full game with `A₁ = A'₁ ⊗ I`, `B₁ = I ⊗ B'₁` on a
/// product shared state.
pub fn example2_full_game(p: f64, perp: PerpConvention) -> Result<f64> {
    let (a, b) = example2_effective_povms();
    let id = ComplexMatrix::identity(2);
    let qubits = DimFactorization::qubits(2);
    let alice = PovmElement::new(a.op().kron(&id)?, qubits.clone())?;
    let bob = PovmElement::new(id.kron(b.op())?, qubits)?;
    let setup = GameSetup::new(werner_decomposition(), product_share(), alice, bob)?;
    noisy_mdi_value(&setup, &NoiseSpec::EntanglingExample2 { p, perp })
}

/// `(p, example2_value(p))` for `p = 0, step, 2·step, …, 1`.
pub fn example2_sweep(step: f64, perp: PerpConvention) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::arg(format!("sweep step {step} is not in (0, 1]")));
    }
    let n = (1.0 / step).round() as usize;
    (0..=n)
        .map(|k| {
            let p = (k as f64 * step).min(1.0);
            Ok((p, example2_value(p, perp)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_zero_noise_weight() {
        let theta = BlochVector::from_angles(1.1, 0.4);
        assert!(example1_value(0.0, &theta).unwrap().abs() < 1e-15);
    }

    #[test]
    fn example1_scales_quadratically() {
        let theta = BlochVector::from_angles(2.0, 3.7);
        let one = example1_value(1.0, &theta).unwrap();
        for q in [0.2, 0.5, 0.9] {
            assert!((example1_value(q, &theta).unwrap() - q * q * one).abs() < 1e-12);
        }
    }

    #[test]
    fn example1_is_negative_somewhere() {
        let best = example1_grid_minimum(1.0, 10, 20).unwrap();
        assert!(best.value < -1e-4);
    }

    #[test]
    fn example2_routes_agree() {
        for perp in PerpConvention::ALL {
            for p in [0.0, 0.3, 1.0] {
                let a = example2_value(p, perp).unwrap();
                let b = example2_full_game(p, perp).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn example2_ideal_inputs_are_not_negative() {
        for perp in PerpConvention::ALL {
            assert!(example2_value(1.0, perp).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn example2_sweep_is_continuous() {
        let sweep = example2_sweep(0.01, PerpConvention::default()).unwrap();
        assert_eq!(sweep.len(), 101);
        for w in sweep.windows(2) {
            assert!((w[0].1 - w[1].1).abs() < 0.05);
        }
    }
}
