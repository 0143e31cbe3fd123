//! Invariant suite behind the `verify` command.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fake::{example1_closed_form, example1_full_game};
use crate::game::{effective_mdi_value, effective_povm, mdi_value, mdi_value_fast, noisy_mdi_value, GameSetup, PovmElement, Side};
use crate::noise::{adjoint_preserves_separability, certify_channel, NoiseSpec, PreparedNoise};
use crate::sampling::SeededRng;
use crate::states::{werner_state, BlochVector, DensityMatrix, PerpConvention};
use crate::tensor::DimFactorization;
use crate::witness::{verify_decomposition, werner_decomposition, werner_witness, WitnessDecomposition};

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random trials for the sampled properties.
    pub trials: usize,
    /// Added to `β₀₀` before anything else runs.
    pub beta_fault: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 2024,
            trials: 200,
            beta_fault: None,
        }
    }
}

/// Whether `observed` must stay below or above `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub observed: f64,
    pub bound: Bound,
    pub limit: f64,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(name: &'static str, observed: f64, bound: Bound, limit: f64) -> Self {
        let passed = match bound {
            Bound::AtMost => observed <= limit,
            Bound::AtLeast => observed >= limit,
        };
        Self {
            name,
            observed,
            bound,
            limit,
            passed,
        }
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "{} {:<44} {:>13.6e} {op} {:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.limit
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteOutcome> {
        self.suites.iter().filter(|s| !s.passed)
    }
}

fn max_over<T: Send>(items: Vec<T>, f: impl Fn(T) -> Result<f64> + Sync + Send) -> Result<f64> {
    items
        .into_par_iter()
        .map(f)
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn random_setup(decomp: &WitnessDecomposition, seed: u64, trial: usize) -> Result<GameSetup> {
    let mut rng = SeededRng::for_trial(seed, trial as u64);
    let shared = rng.separable_state(2, 2, 4)?;
    let qubits = DimFactorization::qubits(2);
    let alice = PovmElement::new(rng.povm_element(4), qubits.clone())?;
    let bob = PovmElement::new(rng.povm_element(4), qubits)?;
    GameSetup::new(decomp.clone(), shared, alice, bob)
}

pub fn run_verify(options: &VerifyOptions) -> Result<VerifyReport> {
    let seed = options.seed;
    let trials = options.trials;
    let mut decomp = werner_decomposition();
    if let Some(delta) = options.beta_fault {
        decomp = decomp.with_beta_shift(0, 0, delta)?;
    }
    let mut suites = Vec::new();

    let recon = verify_decomposition(&decomp, &werner_witness())?;
    suites.push(SuiteOutcome::new("witness reconstruction from decomposition", recon, Bound::AtMost, 1e-10));

    let bell = max_over((0..100).collect(), |i| {
        let mut rng = SeededRng::for_trial(seed, i as u64);
        let rho = DensityMatrix::new(rng.state(4)?.into_op(), DimFactorization::qubits(2))?;
        let full = mdi_value(&GameSetup::bell(decomp.clone(), rho.clone())?)?;
        Ok((full - mdi_value_fast(&decomp, &rho)?).abs())
    })?;
    suites.push(SuiteOutcome::new("Bell-projector game equals Tr(W rho)/4", bell, Bound::AtMost, 1e-10));

    let werner = max_over((0..=20).collect(), |k| {
        let v = k as f64 / 20.0;
        let value = mdi_value(&GameSetup::bell(decomp.clone(), werner_state(v)?)?)?;
        Ok((value - (1.0 - 3.0 * v) / 16.0).abs())
    })?;
    suites.push(SuiteOutcome::new("Werner value (1 - 3v)/16", werner, Bound::AtMost, 1e-10));

    let mdi = -max_over((0..trials).collect(), |i| Ok(-mdi_value(&random_setup(&decomp, seed, i)?)?))?;
    suites.push(SuiteOutcome::new("MDI value on separable states", mdi, Bound::AtLeast, -1e-9));

    let effective = max_over((0..50).collect(), |i| {
        let mut rng = SeededRng::for_trial(seed ^ 0x5eed, i as u64);
        let (sa, sb) = (rng.state(2)?, rng.state(2)?);
        let qubits = DimFactorization::qubits(2);
        let a1 = PovmElement::new(rng.povm_element(4), qubits.clone())?;
        let b1 = PovmElement::new(rng.povm_element(4), qubits)?;
        let setup = GameSetup::new(decomp.clone(), sa.tensor(&sb)?, a1.clone(), b1.clone())?;
        let a = effective_povm(&a1, &sa, Side::Alice)?;
        let b = effective_povm(&b1, &sb, Side::Bob)?;
        Ok((effective_mdi_value(&decomp, &a, &b, &NoiseSpec::Identity)? - mdi_value(&setup)?).abs())
    })?;
    suites.push(SuiteOutcome::new("effective POVMs reproduce the game", effective, Bound::AtMost, 1e-10));

    let catalog = NoiseSpec::uniform_catalog();
    let mut channels: Vec<_> = catalog.iter().map(|n| n.uniform_channel()).collect::<Result<_>>()?;
    let example1 = NoiseSpec::example1(0.7, BlochVector::from_angles(1.0, 2.0));
    if let PreparedNoise::PerPair(table) = example1.prepare(4, 4)? {
        channels.extend(table.into_iter().flatten());
    }
    let certs = channels
        .par_iter()
        .enumerate()
        .map(|(i, ch)| certify_channel(ch, 100, seed + i as u64))
        .collect::<Result<Vec<_>>>()?;
    let tp = certs.iter().map(|c| c.trace_preservation).fold(0.0, f64::max);
    let choi = certs.iter().map(|c| c.choi_min_eigenvalue).fold(f64::INFINITY, f64::min);
    let adj = certs.iter().map(|c| c.adjoint_identity).fold(0.0, f64::max);
    suites.push(SuiteOutcome::new("channel trace preservation", tp, Bound::AtMost, 1e-10));
    suites.push(SuiteOutcome::new("channel Choi positivity", choi, Bound::AtLeast, -1e-9));
    suites.push(SuiteOutcome::new("adjoint trace identity", adj, Bound::AtMost, 1e-10));

    let mut worst_pt = f64::INFINITY;
    let mut preserved = Vec::new();
    for noise in &catalog {
        let verdict = adjoint_preserves_separability(noise, 1000, seed)?;
        worst_pt = worst_pt.min(verdict.worst_pt_eigenvalue);
        if verdict.passed {
            preserved.push(noise.clone());
        }
    }
    suites.push(SuiteOutcome::new("adjoint maps keep product operators PPT", worst_pt, Bound::AtLeast, -1e-9));

    let mut noisy_min = f64::INFINITY;
    for noise in &preserved {
        let worst = -max_over((0..trials).collect(), |i| {
            Ok(-noisy_mdi_value(&random_setup(&decomp, seed, i)?, noise)?)
        })?;
        noisy_min = noisy_min.min(worst);
    }
    suites.push(SuiteOutcome::new("noisy MDI value on separable states", noisy_min, Bound::AtLeast, -1e-9));

    let marginals = max_over(PerpConvention::ALL.to_vec(), |perp| {
        let mut worst = 0.0_f64;
        for p in [0.0, 0.5, 1.0] {
            let noise = NoiseSpec::EntanglingExample2 { p, perp };
            for (s, t) in decomp.pairs() {
                let out = noise.apply(s, t, &decomp.joint_input(s, t)?)?;
                for (side, input) in [(0, &decomp.tau()[s]), (1, &decomp.omega()[t])] {
                    let want = DensityMatrix::mixture(&[
                        (p, input),
                        (1.0 - p, &DensityMatrix::maximally_mixed(DimFactorization::qubits(1))),
                    ])?;
                    worst = worst.max(out.reduce(&[side])?.op().max_abs_diff(want.op())?);
                }
            }
        }
        Ok(worst)
    })?;
    suites.push(SuiteOutcome::new("entangling noise marginals", marginals, Bound::AtMost, 1e-10));

    let ex1 = max_over((0..20).collect(), |k| {
        let theta = BlochVector::from_angles(0.3 + 0.13 * k as f64, 0.7 * k as f64);
        Ok((example1_closed_form(0.8, &theta)? - example1_full_game(0.8, &theta)?).abs())
    })?;
    suites.push(SuiteOutcome::new("non-uniform closed form vs full game", ex1, Bound::AtMost, 1e-10));

    Ok(VerifyReport { suites })
}
