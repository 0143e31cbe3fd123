//! Semi-quantum game engine.
//!
//! The full experiment lives on the four-factor space
//! `A_in ⊗ A_share ⊗ B_share ⊗ B_in`, i.e. `τ_s ⊗ ρ_AB ⊗ ω_t`. Alice's POVM
//! element acts on factors (0, 1) and Bob's on factors (2, 3). Joint inputs
//! are produced on `A_in ⊗ B_in` (so that noise may correlate them) and are
//! moved into place by a subsystem permutation before the trace is taken.

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::states::{max_entangled, DensityMatrix};
use crate::tensor::{hermitian_eigenvalues, partial_trace, permute_subsystems, ComplexMatrix, DimFactorization};
use crate::tol;
use crate::witness::{WitnessDecomposition, WitnessOperator};

/// Order taking `(A_in, B_in, A_sh, B_sh)` to `(A_in, A_sh, B_sh, B_in)`.
const GAME_ORDER: [usize; 4] = [0, 2, 3, 1];

/// Hermitian operator with spectrum in `[0, 1]`: the outcome-"1" element of
/// a binary measurement `{E, I − E}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    op: ComplexMatrix,
    dims: DimFactorization,
}

impl PovmElement {
    pub fn new(op: ComplexMatrix, dims: DimFactorization) -> Result<Self> {
        if !op.is_square() || op.rows() != dims.total() {
            return Err(Error::dim(format!(
                "{}x{} POVM element does not match {:?}",
                op.rows(),
                op.cols(),
                dims.factors()
            )));
        }
        let dev = op.hermiticity_deviation();
        if dev > tol::HERMITIAN {
            return Err(Error::contract(format!(
                "POVM element is not Hermitian (deviation {dev:.3e})"
            )));
        }
        let op = op.hermitian_part();
        let ev = hermitian_eigenvalues(&op)?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -tol::PROBABILITY || hi > 1.0 + tol::PROBABILITY {
            return Err(Error::contract(format!(
                "POVM element spectrum [{lo:.3e}, {hi:.3e}] leaves [0, 1]"
            )));
        }
        Ok(Self { op, dims })
    }

    /// Single-factor element.
    pub fn single(op: ComplexMatrix) -> Result<Self> {
        let dims = DimFactorization::single(op.rows())?;
        Self::new(op, dims)
    }

    /// Projector onto `|Φ⁺⟩` on `d ⊗ d`.
    pub fn bell(d: usize) -> Result<Self> {
        let phi = max_entangled(d)?;
        let dims = phi.dims().clone();
        Ok(Self {
            op: phi.into_op(),
            dims,
        })
    }

    pub fn op(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn dims(&self) -> &DimFactorization {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }
}

/// Which party an effective POVM belongs to; fixes the factor ordering of
/// its measurement (`input ⊗ share` for Alice, `share ⊗ input` for Bob).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
}

/// A complete experimental configuration.
#[derive(Debug, Clone)]
pub struct GameSetup {
    decomp: WitnessDecomposition,
    shared: DensityMatrix,
    alice: PovmElement,
    bob: PovmElement,
    // A₁ ⊗ B₁ on the four-factor game space.
    joint_measurement: ComplexMatrix,
    game_dims: DimFactorization,
}

impl GameSetup {
    pub fn new(
        decomp: WitnessDecomposition,
        shared: DensityMatrix,
        alice: PovmElement,
        bob: PovmElement,
    ) -> Result<Self> {
        if shared.dims().len() != 2 {
            return Err(Error::dim("shared state must be bipartite"));
        }
        let [a_sh, b_sh] = [shared.dims().factors()[0], shared.dims().factors()[1]];
        let a_in = decomp.alice_dim();
        let b_in = decomp.bob_dim();
        if alice.dim() != a_in * a_sh {
            return Err(Error::dim(format!(
                "Alice's element acts on {} dims, expected {a_in}x{a_sh}",
                alice.dim()
            )));
        }
        if bob.dim() != b_sh * b_in {
            return Err(Error::dim(format!(
                "Bob's element acts on {} dims, expected {b_sh}x{b_in}",
                bob.dim()
            )));
        }
        let game_dims = DimFactorization::new(vec![a_in, a_sh, b_sh, b_in])?;
        let joint_measurement = alice.op().kron(bob.op())?;
        Ok(Self {
            decomp,
            shared,
            alice,
            bob,
            joint_measurement,
            game_dims,
        })
    }

    /// Setup with ideal Bell-projector measurements on both sides.
    pub fn bell(decomp: WitnessDecomposition, shared: DensityMatrix) -> Result<Self> {
        let alice = PovmElement::bell(decomp.alice_dim())?;
        let bob = PovmElement::bell(decomp.bob_dim())?;
        Self::new(decomp, shared, alice, bob)
    }

    /// Same measurements and decomposition, different shared state.
    pub fn with_shared(&self, shared: DensityMatrix) -> Result<Self> {
        Self::new(self.decomp.clone(), shared, self.alice.clone(), self.bob.clone())
    }

    pub fn decomposition(&self) -> &WitnessDecomposition {
        &self.decomp
    }

    pub fn shared(&self) -> &DensityMatrix {
        &self.shared
    }

    pub fn alice(&self) -> &PovmElement {
        &self.alice
    }

    pub fn bob(&self) -> &PovmElement {
        &self.bob
    }

    /// `P(1,1)` for an arbitrary joint input operator on `A_in ⊗ B_in`.
    pub fn prob_for_input(&self, joint_input: &ComplexMatrix) -> Result<f64> {
        let a_in = self.decomp.alice_dim();
        let b_in = self.decomp.bob_dim();
        if joint_input.rows() != a_in * b_in || !joint_input.is_square() {
            return Err(Error::dim(format!(
                "joint input is {}x{}, expected {}",
                joint_input.rows(),
                joint_input.cols(),
                a_in * b_in
            )));
        }
        let sh = self.shared.dims().factors();
        let staged_dims = DimFactorization::new(vec![a_in, b_in, sh[0], sh[1]])?;
        let staged = joint_input.kron(self.shared.op())?;
        let (full, dims) = permute_subsystems(&staged, &staged_dims, &GAME_ORDER)?;
        debug_assert_eq!(dims, self.game_dims);
        let z = self.joint_measurement.trace_product(&full)?;
        checked_probability(z.re)
    }

    /// `P(1,1 | τ_s, ω_t) = Tr[(A₁ ⊗ B₁)(τ_s ⊗ ρ_AB ⊗ ω_t)]`.
    pub fn joint_prob(&self, s: usize, t: usize) -> Result<f64> {
        self.check_indices(s, t)?;
        let input = self.decomp.tau()[s].op().kron(self.decomp.omega()[t].op())?;
        self.prob_for_input(&input)
    }

    fn check_indices(&self, s: usize, t: usize) -> Result<()> {
        if s >= self.decomp.tau().len() || t >= self.decomp.omega().len() {
            return Err(Error::arg(format!("input index ({s}, {t}) out of range")));
        }
        Ok(())
    }
}

/// Accept a probability within the slack around `[0, 1]` and clamp it.
fn checked_probability(p: f64) -> Result<f64> {
    if !(-tol::PROBABILITY..=1.0 + tol::PROBABILITY).contains(&p) {
        return Err(Error::contract(format!("probability {p:.6e} outside [0, 1]")));
    }
    if p < 0.0 {
        if p < -1e-12 {
            warn!("clamping probability {p:.3e} to 0");
        } else {
            debug!("clamping probability {p:.3e} to 0");
        }
        return Ok(0.0);
    }
    Ok(p.min(1.0))
}

/// `I(P) = Σ β_{s,t} P(1,1 | τ_s, ω_t)`.
pub fn mdi_value(setup: &GameSetup) -> Result<f64> {
    let beta = setup.decomp.beta();
    setup
        .decomp
        .pairs()
        .map(|(s, t)| Ok(beta[s][t] * setup.joint_prob(s, t)?))
        .sum()
}

/// `Tr(W ρ) / (d_A d_B)` with `W` rebuilt from the decomposition; equals
/// [`mdi_value`] when both parties use Bell projectors.
pub fn mdi_value_fast(decomp: &WitnessDecomposition, rho: &DensityMatrix) -> Result<f64> {
    let w = decomp.reconstruct()?;
    if rho.dim() != w.rows() {
        return Err(Error::dim(format!(
            "state of dimension {} against a {}-dimensional witness",
            rho.dim(),
            w.rows()
        )));
    }
    let z = w.trace_product(rho.op())?;
    Ok(z.re / rho.dim() as f64)
}

/// Effective POVM element on the quantum input obtained by absorbing a
/// fixed share state: `Tr_share[E (I_in ⊗ σ)]` for Alice and
/// `Tr_share[E (σ ⊗ I_in)]` for Bob.
pub fn effective_povm(element: &PovmElement, share_state: &DensityMatrix, side: Side) -> Result<PovmElement> {
    let d_sh = share_state.dim();
    if !element.dim().is_multiple_of(d_sh) {
        return Err(Error::dim(format!(
            "element of dimension {} does not factor over a {d_sh}-dimensional share",
            element.dim()
        )));
    }
    let d_in = element.dim() / d_sh;
    let id = ComplexMatrix::identity(d_in);
    let (lift, dims, keep) = match side {
        Side::Alice => (id.kron(share_state.op())?, vec![d_in, d_sh], 0),
        Side::Bob => (share_state.op().kron(&id)?, vec![d_sh, d_in], 1),
    };
    let dims = DimFactorization::new(dims)?;
    let reduced = partial_trace(&element.op().try_mul(&lift)?, &dims, &[keep])?;
    PovmElement::single(reduced.hermitian_part())
}

/// `Σ β_{s,t} Tr[(A' ⊗ B') Λ^{st}(τ_s ⊗ ω_t)]` for effective elements acting
/// directly on the (possibly noisy) inputs.
pub fn effective_mdi_value(
    decomp: &WitnessDecomposition,
    alice: &PovmElement,
    bob: &PovmElement,
    noise: &NoiseSpec,
) -> Result<f64> {
    if alice.dim() != decomp.alice_dim() || bob.dim() != decomp.bob_dim() {
        return Err(Error::dim("effective elements must act on the input spaces"));
    }
    let ab = alice.op().kron(bob.op())?;
    let beta = decomp.beta();
    let prepared = noise.prepare(decomp.tau().len(), decomp.omega().len())?;
    decomp
        .pairs()
        .map(|(s, t)| {
            let out = prepared.apply(s, t, &decomp.joint_input(s, t)?)?;
            let p = checked_probability(ab.trace_product(out.op())?.re)?;
            Ok(beta[s][t] * p)
        })
        .sum()
}

/// `Σ β_{s,t} P(1,1 | Λ^{st}(τ_s ⊗ ω_t))` on the full game space.
pub fn noisy_mdi_value(setup: &GameSetup, noise: &NoiseSpec) -> Result<f64> {
    if setup.decomp.alice_dim() != 2 || setup.decomp.bob_dim() != 2 {
        return Err(Error::dim("noise models act on qubit inputs"));
    }
    let beta = setup.decomp.beta();
    let prepared = noise.prepare(setup.decomp.tau().len(), setup.decomp.omega().len())?;
    setup
        .decomp
        .pairs()
        .map(|(s, t)| {
            let noisy = prepared.apply(s, t, &setup.decomp.joint_input(s, t)?)?;
            Ok(beta[s][t] * setup.prob_for_input(noisy.op())?)
        })
        .sum()
}

/// `W' = Σ β_{s,t} Λ(τ_s ⊗ ω_t)ᵀ` for a uniform channel `Λ`.
pub fn modified_witness(decomp: &WitnessDecomposition, noise: &NoiseSpec) -> Result<WitnessOperator> {
    if !noise.is_uniform() {
        return Err(Error::arg(format!(
            "modified witness needs uniform noise, got {}",
            noise.kind_name()
        )));
    }
    let channel = noise.uniform_channel()?;
    let n = decomp.alice_dim() * decomp.bob_dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (s, t) in decomp.pairs() {
        let out = channel.apply(decomp.joint_input(s, t)?.op())?;
        acc = &acc + &out.transpose().scale_real(decomp.beta()[s][t]);
    }
    WitnessOperator::new(acc, decomp.dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SeededRng;
    use crate::states::{werner_state, BlochVector};
    use crate::witness::{werner_decomposition, werner_inputs};

    fn bell_setup(rho: DensityMatrix) -> GameSetup {
        GameSetup::bell(werner_decomposition(), rho).unwrap()
    }

    #[test]
    fn maximally_mixed_inputs_give_one_sixteenth() {
        let mixed = DensityMatrix::maximally_mixed(DimFactorization::qubits(1));
        let d = WitnessDecomposition::new(vec![vec![1.0]], vec![mixed.clone()], vec![mixed]).unwrap();
        let mut rng = SeededRng::new(3);
        for _ in 0..5 {
            let rho = rng.state(4).unwrap();
            let rho = DensityMatrix::new(rho.into_op(), DimFactorization::qubits(2)).unwrap();
            let setup = GameSetup::bell(d.clone(), rho).unwrap();
            assert!((setup.joint_prob(0, 0).unwrap() - 1.0 / 16.0).abs() < 1e-14);
        }
    }

    #[test]
    fn joint_prob_matches_reduced_formula() {
        let setup = bell_setup(werner_state(1.0).unwrap());
        let d = werner_decomposition();
        let reduced = d.tau()[0]
            .op()
            .transpose()
            .kron(&d.omega()[0].op().transpose())
            .unwrap()
            .trace_product(setup.shared().op())
            .unwrap()
            .re
            / 4.0;
        assert!((setup.joint_prob(0, 0).unwrap() - reduced).abs() < 1e-14);
    }

    #[test]
    fn zero_element_gives_zero() {
        let zero = PovmElement::new(ComplexMatrix::zeros(4, 4), DimFactorization::qubits(2)).unwrap();
        let setup = GameSetup::new(
            werner_decomposition(),
            werner_state(0.7).unwrap(),
            zero,
            PovmElement::bell(2).unwrap(),
        )
        .unwrap();
        assert_eq!(setup.joint_prob(1, 2).unwrap(), 0.0);
        assert!(setup.joint_prob(4, 0).is_err());
    }

    #[test]
    fn werner_mdi_values() {
        for v in [0.0, 0.25, 0.5, 1.0] {
            let val = mdi_value(&bell_setup(werner_state(v).unwrap())).unwrap();
            assert!((val - (1.0 - 3.0 * v) / 16.0).abs() < 1e-10, "v = {v}");
        }
        let boundary = mdi_value(&bell_setup(werner_state(1.0 / 3.0).unwrap())).unwrap();
        assert!(boundary.abs() < 1e-10);
        let fast = mdi_value_fast(&werner_decomposition(), &werner_state(1.0).unwrap()).unwrap();
        assert!((fast + 0.125).abs() < 1e-12);
    }

    #[test]
    fn fast_route_rejects_wrong_dimension() {
        let rho = crate::states::random_density(3, 1).unwrap();
        assert!(matches!(
            mdi_value_fast(&werner_decomposition(), &rho),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn effective_povm_examples() {
        let phi = PovmElement::bell(2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(DimFactorization::qubits(1));
        for side in [Side::Alice, Side::Bob] {
            let e = effective_povm(&phi, &mixed, side).unwrap();
            assert!(e.op().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.25)).unwrap() < 1e-15);
        }
        let id = PovmElement::new(ComplexMatrix::identity(4), DimFactorization::qubits(2)).unwrap();
        let sigma = crate::states::bloch_state(&BlochVector::new(0.3, -0.2, 0.5).unwrap());
        let e = effective_povm(&id, &sigma, Side::Bob).unwrap();
        assert!(e.op().max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-15);
    }

    #[test]
    fn effective_povms_reproduce_full_game() {
        let mut rng = SeededRng::new(99);
        let d = werner_decomposition();
        for _ in 0..10 {
            let sa = rng.state(2).unwrap();
            let sb = rng.state(2).unwrap();
            let a1 = PovmElement::new(rng.povm_element(4), DimFactorization::qubits(2)).unwrap();
            let b1 = PovmElement::new(rng.povm_element(4), DimFactorization::qubits(2)).unwrap();
            let setup = GameSetup::new(d.clone(), sa.tensor(&sb).unwrap(), a1.clone(), b1.clone()).unwrap();
            let ae = effective_povm(&a1, &sa, Side::Alice).unwrap();
            let be = effective_povm(&b1, &sb, Side::Bob).unwrap();
            let ab = ae.op().kron(be.op()).unwrap();
            for (s, t) in d.pairs() {
                let direct = ab.trace_product(d.joint_input(s, t).unwrap().op()).unwrap().re;
                assert!((direct - setup.joint_prob(s, t).unwrap()).abs() < 1e-10);
            }
            let via_eff = effective_mdi_value(&d, &ae, &be, &NoiseSpec::Identity).unwrap();
            assert!((via_eff - mdi_value(&setup).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_noise_is_transparent() {
        let setup = bell_setup(werner_state(0.8).unwrap());
        let a = mdi_value(&setup).unwrap();
        let b = noisy_mdi_value(&setup, &NoiseSpec::Identity).unwrap();
        assert!((a - b).abs() < 1e-12);
        let w = modified_witness(&werner_decomposition(), &NoiseSpec::Identity).unwrap();
        assert!(w.op().max_abs_diff(crate::witness::werner_witness().op()).unwrap() < 1e-10);
    }

    #[test]
    fn white_noise_value_and_modified_witness() {
        let (p1, p2) = (0.9, 0.7);
        let noise = NoiseSpec::WhiteNoise { p1, p2 };
        for v in [0.0, 0.4, 1.0] {
            let val = noisy_mdi_value(&bell_setup(werner_state(v).unwrap()), &noise).unwrap();
            let want = p1 * p2 * (1.0 - 3.0 * v) / 16.0 + (1.0 - p1 * p2) / 16.0;
            assert!((val - want).abs() < 1e-10);
        }
        let full = NoiseSpec::WhiteNoise { p1: 0.0, p2: 0.0 };
        let w = modified_witness(&werner_decomposition(), &full).unwrap();
        assert!(w.op().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap() < 1e-12);
    }

    #[test]
    fn modified_witness_rejects_non_uniform_noise() {
        let noise = NoiseSpec::EntanglingExample2 {
            p: 0.3,
            perp: Default::default(),
        };
        assert!(matches!(
            modified_witness(&werner_decomposition(), &noise),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn probability_slack() {
        assert_eq!(checked_probability(-5e-10).unwrap(), 0.0);
        assert_eq!(checked_probability(1.0 + 5e-10).unwrap(), 1.0);
        assert!(checked_probability(-1e-6).is_err());
        let _ = werner_inputs();
    }
}
