//! Critical Werner visibilities `v*` above which the noisy MDI witness
//! detects `ρ_v = v|Ψ⁻⟩⟨Ψ⁻| + (1−v)I/4`.
//!
//! `v* = ∞` encodes "never detectable". Each closed form has an independent
//! numerical counterpart in [`numeric_threshold`], which evaluates the game
//! engine at several visibilities.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{noisy_mdi_value, GameSetup};
use crate::noise::NoiseSpec;
use crate::states::{werner_state, DensityMatrix};
use crate::witness::werner_decomposition;

/// Slack on `v* ≤ 1` for the detectable flag.
pub const DETECTABLE_SLACK: f64 = 1e-12;
/// Accuracy of the numerical root.
pub const ROOT_TOL: f64 = 1e-9;
/// Allowed departure of the noisy value from an affine function of `v`.
pub const LINEARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumConvention {
    /// `Σ_{i,j} p_i p_j` over all ordered pairs.
    AllPairs,
    /// `Σ_{i≠j} p_i p_j` over ordered pairs.
    OffDiagonal,
    /// `Σ_{i<j} p_i p_j`.
    UnorderedPairs,
}

impl SumConvention {
    pub const ALL: [SumConvention; 3] = [
        SumConvention::AllPairs,
        SumConvention::OffDiagonal,
        SumConvention::UnorderedPairs,
    ];

    pub fn pair_sum(self, probs: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (i, pi) in probs.iter().enumerate() {
            for (j, pj) in probs.iter().enumerate() {
                let include = match self {
                    SumConvention::AllPairs => true,
                    SumConvention::OffDiagonal => i != j,
                    SumConvention::UnorderedPairs => i < j,
                };
                if include {
                    sum += pi * pj;
                }
            }
        }
        sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    WhiteNoise,
    Admixture,
    PauliSame,
    PauliDifferent,
    AmplitudeDamping,
    Memory(SumConvention),
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    #[serde(serialize_with = "finite_or_null")]
    pub v_star: f64,
    pub detectable: bool,
    pub formula: FormulaId,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl ThresholdResult {
    pub fn new(v_star: f64, formula: FormulaId) -> Self {
        Self {
            v_star,
            detectable: v_star <= 1.0 + DETECTABLE_SLACK,
            formula,
        }
    }

    /// `v* = 1/den` for a positive denominator, `∞` otherwise.
    pub fn reciprocal(den: f64, formula: FormulaId) -> Self {
        Self::new(if den > 0.0 { 1.0 / den } else { f64::INFINITY }, formula)
    }

    /// Both infinite, or both finite and within `tol`.
    pub fn agrees_with(&self, other: &ThresholdResult, tol: f64) -> bool {
        match (self.v_star.is_finite(), other.v_star.is_finite()) {
            (true, true) => (self.v_star - other.v_star).abs() <= tol,
            (false, false) => true,
            _ => false,
        }
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::arg(format!("{name} = {x} is not in [0, 1]")));
    }
    Ok(())
}

/// `v* = 1/(3 p₁ p₂)`.
pub fn white_noise_threshold(p1: f64, p2: f64) -> Result<ThresholdResult> {
    check_unit("p1", p1)?;
    check_unit("p2", p2)?;
    Ok(ThresholdResult::reciprocal(3.0 * p1 * p2, FormulaId::WhiteNoise))
}

/// Parameters `(x₀, x₁, x₂)` of a qubit state `[[x₀, x₁ + i x₂], [x₁ − i x₂, 1 − x₀]]`.
pub fn admixture_parameters(x: &DensityMatrix) -> Result<[f64; 3]> {
    if x.dim() != 2 {
        return Err(Error::dim("admixed states must be qubit states"));
    }
    let off = x.op().get(0, 1);
    Ok([x.op().get(0, 0).re, off.re, off.im])
}

/// `A = 3p₁p₂ + (1−p₁)(1−p₂){(1−2x₀)(1−2y₀) + 4(x₁y₁ + x₂y₂)}`.
pub fn admixture_a(p1: f64, p2: f64, x: &DensityMatrix, y: &DensityMatrix) -> Result<f64> {
    check_unit("p1", p1)?;
    check_unit("p2", p2)?;
    let [x0, x1, x2] = admixture_parameters(x)?;
    let [y0, y1, y2] = admixture_parameters(y)?;
    let overlap = (1.0 - 2.0 * x0) * (1.0 - 2.0 * y0) + 4.0 * (x1 * y1 + x2 * y2);
    Ok(3.0 * p1 * p2 + (1.0 - p1) * (1.0 - p2) * overlap)
}

pub fn admixture_threshold(p1: f64, p2: f64, x: &DensityMatrix, y: &DensityMatrix) -> Result<ThresholdResult> {
    Ok(ThresholdResult::reciprocal(admixture_a(p1, p2, x, y)?, FormulaId::Admixture))
}

/// `(A_min, A_max) = 3p₁p₂ ∓ (1−p₁)(1−p₂)` over all admixed states.
pub fn admixture_extremes(p1: f64, p2: f64) -> Result<(f64, f64)> {
    check_unit("p1", p1)?;
    check_unit("p2", p2)?;
    let base = 3.0 * p1 * p2;
    let spread = (1.0 - p1) * (1.0 - p2);
    Ok((base - spread, base + spread))
}

/// Flip `σ_i` on Alice's side and `σ_j` on Bob's.
pub fn pauli_threshold(i: usize, j: usize, p1: f64, p2: f64) -> Result<ThresholdResult> {
    check_unit("p1", p1)?;
    check_unit("p2", p2)?;
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::arg(format!("Pauli indices ({i}, {j}) must lie in 1..=3")));
    }
    Ok(if i == j {
        ThresholdResult::reciprocal(8.0 * p1 * p2 - 4.0 * p1 - 4.0 * p2 + 3.0, FormulaId::PauliSame)
    } else {
        ThresholdResult::reciprocal(4.0 * p1 * p2 - 1.0, FormulaId::PauliDifferent)
    })
}

/// `1 − ε₁ − ε₂ + 2ε₁ε₂ + 2√((1−ε₁)(1−ε₂))`.
pub fn amplitude_damping_bracket(eps1: f64, eps2: f64) -> f64 {
    1.0 - eps1 - eps2 + 2.0 * eps1 * eps2 + 2.0 * ((1.0 - eps1) * (1.0 - eps2)).sqrt()
}

pub fn amplitude_damping_threshold(eps1: f64, eps2: f64) -> Result<ThresholdResult> {
    check_unit("eps1", eps1)?;
    check_unit("eps2", eps2)?;
    Ok(ThresholdResult::reciprocal(
        amplitude_damping_bracket(eps1, eps2),
        FormulaId::AmplitudeDamping,
    ))
}

/// `v* = 1/(3 + 8(m−1)Σ)` with `Σ` the pair sum under `convention`.
pub fn memory_threshold(m: f64, probs: &[f64], convention: SumConvention) -> Result<ThresholdResult> {
    check_unit("m", m)?;
    for (k, &p) in probs.iter().enumerate() {
        check_unit(&format!("probs[{k}]"), p)?;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > crate::tol::PROB_SUM {
        return Err(Error::arg(format!("probabilities sum to {total}, not 1")));
    }
    let den = 3.0 + 8.0 * (m - 1.0) * convention.pair_sum(probs);
    Ok(ThresholdResult::reciprocal(den, FormulaId::Memory(convention)))
}

/// Noisy MDI value of the Werner state `ρ_v` with Bell-projector measurements.
pub fn werner_noisy_value(noise: &NoiseSpec, v: f64) -> Result<f64> {
    let setup = GameSetup::bell(werner_decomposition(), werner_state(v)?)?;
    noisy_mdi_value(&setup, noise)
}

/// Root of a continuous `f` with a sign change on `[lo, hi]`, to width `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        return Err(Error::arg(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Numerical `v*` from the game engine. The value is affine in `v`
/// (mixture linearity), so the root is solved from two evaluations,
/// checked at a third, and refined by bisection when it lies in `[0, 1]`
/// and the affine solve misses. The affine root is also reported beyond
/// `v = 1`, so it can be compared with closed forms there.
pub fn numeric_threshold(noise: &NoiseSpec) -> Result<ThresholdResult> {
    if !noise.is_uniform() {
        return Err(Error::arg(format!(
            "threshold search needs uniform noise, got {}",
            noise.kind_name()
        )));
    }
    let f = |v: f64| werner_noisy_value(noise, v);
    let (f0, f1, fm) = (f(0.0)?, f(1.0)?, f(0.5)?);
    if (fm - 0.5 * (f0 + f1)).abs() > LINEARITY_TOL {
        return Err(Error::Consistency(format!(
            "noisy value is not affine in v: f(0)={f0}, f(1/2)={fm}, f(1)={f1}"
        )));
    }
    if f0 <= 0.0 {
        return Err(Error::Consistency(format!(
            "noisy value of the maximally mixed state is {f0}, expected positive"
        )));
    }
    // A drop below this over v ∈ [0, 1] puts the root beyond ~1e12.
    if f0 - f1 <= 1e-14 {
        return Ok(ThresholdResult::new(f64::INFINITY, FormulaId::Numeric));
    }
    let mut root = f0 / (f0 - f1);
    if root <= 1.0 && f(root)?.abs() > ROOT_TOL * (f0 - f1) {
        root = bisect(f, 0.0, 1.0, ROOT_TOL)?;
    }
    Ok(ThresholdResult::new(root, FormulaId::Numeric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::PauliIndexSet;
    use crate::states::{bloch_state, BlochVector};

    fn up() -> DensityMatrix {
        bloch_state(&BlochVector::new(0.0, 0.0, 1.0).unwrap())
    }

    fn down() -> DensityMatrix {
        bloch_state(&BlochVector::new(0.0, 0.0, -1.0).unwrap())
    }

    #[test]
    fn white_noise_examples() {
        assert!((white_noise_threshold(1.0, 1.0).unwrap().v_star - 1.0 / 3.0).abs() < 1e-15);
        let edge = white_noise_threshold(1.0, 1.0 / 3.0).unwrap();
        assert!((edge.v_star - 1.0).abs() < 1e-15 && edge.detectable);
        let half = white_noise_threshold(0.5, 0.5).unwrap();
        assert!((half.v_star - 4.0 / 3.0).abs() < 1e-15 && !half.detectable);
        assert!(white_noise_threshold(0.0, 0.7).unwrap().v_star.is_infinite());
    }

    #[test]
    fn admixture_examples() {
        assert_eq!(admixture_extremes(1.0, 1.0).unwrap(), (3.0, 3.0));
        assert_eq!(admixture_extremes(0.0, 0.0).unwrap(), (-1.0, 1.0));
        let r = admixture_threshold(1.0, 1.0, &up(), &down()).unwrap();
        assert!((r.v_star - 1.0 / 3.0).abs() < 1e-15);
        assert!(admixture_threshold(0.0, 0.0, &up(), &down()).unwrap().v_star.is_infinite());
        assert_eq!(admixture_threshold(0.0, 0.0, &up(), &up()).unwrap().v_star, 1.0);
    }

    #[test]
    fn pauli_examples() {
        for (p1, p2) in [(1.0, 1.0), (0.0, 0.0)] {
            assert!((pauli_threshold(2, 2, p1, p2).unwrap().v_star - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(pauli_threshold(1, 1, 1.0, 0.5).unwrap().v_star, 1.0);
        assert!((pauli_threshold(1, 3, 1.0, 1.0).unwrap().v_star - 1.0 / 3.0).abs() < 1e-15);
        assert!(pauli_threshold(1, 3, 0.4, 0.5).unwrap().v_star.is_infinite());
        assert!(pauli_threshold(0, 1, 0.4, 0.5).is_err());
    }

    #[test]
    fn amplitude_damping_examples() {
        assert!((amplitude_damping_bracket(0.0, 0.0) - 3.0).abs() < 1e-15);
        assert!((amplitude_damping_bracket(1.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((amplitude_damping_threshold(0.5, 0.5).unwrap().v_star - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn memory_examples() {
        for conv in SumConvention::ALL {
            let r = memory_threshold(1.0, &[0.2, 0.3, 0.5], conv).unwrap();
            assert!((r.v_star - 1.0 / 3.0).abs() < 1e-15);
        }
        let r = memory_threshold(0.0, &[1.0, 0.0, 0.0], SumConvention::OffDiagonal).unwrap();
        assert!((r.v_star - 1.0 / 3.0).abs() < 1e-15);
        let third = 1.0 / 3.0;
        let r = memory_threshold(0.0, &[third, third, 1.0 - 2.0 * third], SumConvention::OffDiagonal).unwrap();
        assert!(r.v_star.is_infinite());
    }

    #[test]
    fn numeric_examples() {
        let r = numeric_threshold(&NoiseSpec::WhiteNoise { p1: 1.0, p2: 1.0 }).unwrap();
        assert!((r.v_star - 1.0 / 3.0).abs() < 1e-9);
        let r = numeric_threshold(&NoiseSpec::AmplitudeDamping { eps1: 0.5, eps2: 0.5 }).unwrap();
        assert!((r.v_star - 2.0 / 3.0).abs() < 1e-9);
        let r = numeric_threshold(&NoiseSpec::PauliFlip {
            i: 1,
            j: 2,
            p1: 0.4,
            p2: 0.5,
        })
        .unwrap();
        assert!(r.v_star.is_infinite());
        let r = numeric_threshold(&NoiseSpec::CorrelatedPauli {
            m: 1.0,
            probs: vec![0.1, 0.6, 0.3],
            index_set: PauliIndexSet::Flips,
        })
        .unwrap();
        assert!((r.v_star - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn numeric_rejects_non_uniform_noise() {
        let noise = NoiseSpec::example1(0.5, BlochVector::new(1.0, 0.0, 0.0).unwrap());
        assert!(matches!(numeric_threshold(&noise), Err(Error::Argument(_))));
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        assert!(bisect(|x| Ok(x + 1.0), 0.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn threshold_serializes_infinity_as_null() {
        let r = ThresholdResult::new(f64::INFINITY, FormulaId::Numeric);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"v_star":null,"detectable":false,"formula":"numeric"}"#
        );
    }
}
