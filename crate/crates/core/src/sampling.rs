//! Seeded sampling of states, operators and POVM elements for property checks.
//!
//! All randomness flows through [`SeededRng`] (xoshiro256++), so every
//! stochastic check is reproducible bit-for-bit from its seed. Loops over
//! trials derive one generator per trial from `seed + trial`.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::Result;
use crate::states::{random_density_with, DensityMatrix};
use crate::tensor::{hermitian_eigenvalues, ComplexMatrix, DimFactorization, C64};

/// Offset added to the largest eigenvalue when rescaling a random PSD
/// operator into a POVM element, keeping it strictly below the identity.
pub const POVM_DELTA: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Generator for trial `index` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        Self::new(seed.wrapping_add(index))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn gaussian(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        C64::new(self.gaussian(), self.gaussian())
    }

    /// `d × d` matrix of independent standard complex Gaussians.
    pub fn ginibre(&mut self, d: usize) -> ComplexMatrix {
        let data = (0..d * d).map(|_| self.complex_gaussian()).collect();
        ComplexMatrix::new(d, d, data).expect("finite Gaussian entries")
    }

    /// Unnormalized PSD operator `G G†`.
    pub fn psd(&mut self, d: usize) -> ComplexMatrix {
        let g = self.ginibre(d);
        (&g * &g.dagger()).hermitian_part()
    }

    /// Hermitian operator `(G + G†) / 2`.
    pub fn hermitian(&mut self, d: usize) -> ComplexMatrix {
        self.ginibre(d).hermitian_part()
    }

    /// POVM element `R / (λ_max(R) + δ)` with `R` random PSD, so `0 ≤ E < I`.
    pub fn povm_element(&mut self, d: usize) -> ComplexMatrix {
        let r = self.psd(d);
        let lmax = *hermitian_eigenvalues(&r)
            .expect("PSD operator is Hermitian")
            .last()
            .expect("nonempty");
        r.scale_real(1.0 / (lmax + POVM_DELTA))
    }

    pub fn state(&mut self, d: usize) -> Result<DensityMatrix> {
        random_density_with(d, self)
    }

    /// `σ_A ⊗ σ_B` with both factors Hilbert–Schmidt random.
    pub fn product_state(&mut self, da: usize, db: usize) -> Result<DensityMatrix> {
        let a = self.state(da)?;
        let b = self.state(db)?;
        a.tensor(&b)
    }

    /// Convex mixture of between one and `max_terms` random product states.
    pub fn separable_state(&mut self, da: usize, db: usize, max_terms: usize) -> Result<DensityMatrix> {
        let terms = 1 + (self.uniform() * max_terms as f64) as usize;
        let terms = terms.min(max_terms).max(1);
        let mut weights: Vec<f64> = (0..terms).map(|_| self.uniform() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut op = ComplexMatrix::zeros(da * db, da * db);
        for w in &weights {
            let p = self.product_state(da, db)?;
            op = &op + &p.op().scale_real(*w);
        }
        DensityMatrix::new(op, DimFactorization::new(vec![da, db])?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::is_ppt;

    #[test]
    fn povm_elements_lie_between_zero_and_identity() {
        let mut rng = SeededRng::new(7);
        for _ in 0..20 {
            let e = rng.povm_element(4);
            let ev = hermitian_eigenvalues(&e).unwrap();
            assert!(ev[0] >= -1e-12);
            assert!(*ev.last().unwrap() < 1.0);
        }
    }

    #[test]
    fn separable_samples_are_ppt_states() {
        let mut rng = SeededRng::new(11);
        for _ in 0..20 {
            let s = rng.separable_state(2, 2, 4).unwrap();
            assert!(is_ppt(&s).unwrap().ppt);
        }
    }

    #[test]
    fn trial_generators_are_reproducible() {
        let a = SeededRng::for_trial(5, 3).ginibre(2);
        let b = SeededRng::new(8).ginibre(2);
        assert_eq!(a, b);
    }
}
