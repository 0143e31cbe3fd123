//! Density matrices and the concrete states used by the witness protocol:
//! Bloch-parametrized qubits, maximally entangled states, the Werner family
//! and the partial-transpose separability test for two qubits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SeededRng;
use crate::tensor::{
    hermitian_eigen, hermitian_eigenvalues, partial_transpose, pauli, ComplexMatrix, DimFactorization, C64, ONE, ZERO,
};
use crate::tol;

/// Hermitian, unit-trace, positive semidefinite operator with its subsystem layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    op: ComplexMatrix,
    dims: DimFactorization,
}

impl DensityMatrix {
    pub fn new(op: ComplexMatrix, dims: DimFactorization) -> Result<Self> {
        if !op.is_square() || op.rows() != dims.total() {
            return Err(Error::dim(format!(
                "{}x{} operator does not match factorization {:?}",
                op.rows(),
                op.cols(),
                dims.factors()
            )));
        }
        let dev = op.hermiticity_deviation();
        if dev > tol::HERMITIAN {
            return Err(Error::contract(format!("state is not Hermitian (deviation {dev:.3e})")));
        }
        let op = op.hermitian_part();
        let tr = op.trace().re;
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::contract(format!("state trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&op)?[0];
        if min < tol::PSD {
            return Err(Error::contract(format!(
                "state has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { op, dims })
    }

    /// Single-system state (one factor).
    pub fn single(op: ComplexMatrix) -> Result<Self> {
        let dims = DimFactorization::single(op.rows())?;
        Self::new(op, dims)
    }

    /// Normalize a nonzero PSD operator and wrap it.
    pub fn from_psd(op: &ComplexMatrix, dims: DimFactorization) -> Result<Self> {
        let tr = op.trace().re;
        if tr <= 0.0 {
            return Err(Error::arg("cannot normalize an operator with non-positive trace"));
        }
        Self::new(op.scale_real(1.0 / tr), dims)
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[C64], dims: DimFactorization) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > tol::TRACE {
            return Err(Error::arg(format!("ket has squared norm {norm}, expected 1")));
        }
        Self::new(ComplexMatrix::outer(ket), dims)
    }

    /// `I_d / d`.
    pub fn maximally_mixed(dims: DimFactorization) -> Self {
        let d = dims.total();
        Self {
            op: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims,
        }
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

    pub fn into_op(self) -> ComplexMatrix {
        self.op
    }

    pub fn purity(&self) -> f64 {
        self.op.trace_product(&self.op).expect("square").re
    }

    /// `self ⊗ other`, concatenating factorizations.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mut f = self.dims.factors().to_vec();
        f.extend_from_slice(other.dims.factors());
        Ok(Self {
            op: self.op.kron(&other.op)?,
            dims: DimFactorization::new(f)?,
        })
    }

    /// Reduced state on the kept subsystems.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let op = crate::tensor::partial_trace(&self.op, &self.dims, keep)?;
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        Self::new(op, self.dims.select(&kept)?)
    }

    /// Convex combination `Σ w_k ρ_k` of states with identical layout.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let (_, first) = parts.first().ok_or_else(|| Error::arg("empty mixture"))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > tol::PROB_SUM * 1e3 {
            return Err(Error::arg("mixture weights must be non-negative and sum to 1"));
        }
        let mut op = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::dim("mixture components have different layouts"));
            }
            op = &op + &rho.op.scale_real(*w);
        }
        Self::new(op, first.dims.clone())
    }
}

/// Real vector `(n1, n2, n3)` with `|n| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    n: [f64; 3],
}

impl BlochVector {
    pub fn new(n1: f64, n2: f64, n3: f64) -> Result<Self> {
        let n = [n1, n2, n3];
        if n.iter().any(|x| !x.is_finite()) {
            return Err(Error::arg("Bloch components must be finite"));
        }
        let norm2: f64 = n.iter().map(|x| x * x).sum();
        if norm2 > 1.0 + tol::BLOCH_NORM {
            return Err(Error::arg(format!(
                "Bloch vector {n:?} has length {} > 1",
                norm2.sqrt()
            )));
        }
        Ok(Self { n })
    }

    pub fn origin() -> Self {
        Self { n: [0.0; 3] }
    }

    /// Unit vector at polar angle `theta`, azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            n: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
        }
    }

    pub fn components(&self) -> [f64; 3] {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.n.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn neg(&self) -> Self {
        Self { n: self.n.map(|x| -x) }
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.n.iter().zip(&other.n).map(|(a, b)| a * b).sum()
    }

    /// Bloch vector of a single-qubit state, `n_k = Tr(ρ σ_k)`.
    pub fn of_state(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::dim("Bloch vector needs a qubit state"));
        }
        let mut n = [0.0; 3];
        for (k, slot) in n.iter_mut().enumerate() {
            *slot = rho.op().trace_product(&pauli(k + 1))?.re;
        }
        Self::new(n[0], n[1], n[2])
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;
    fn try_from(n: [f64; 3]) -> Result<Self> {
        Self::new(n[0], n[1], n[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(b: BlochVector) -> Self {
        b.n
    }
}

/// `(I₂ + n·σ) / 2`.
pub fn bloch_state(n: &BlochVector) -> DensityMatrix {
    let [n1, n2, n3] = n.n;
    let op = ComplexMatrix::from_parts_2x2(
        C64::new((1.0 + n3) / 2.0, 0.0),
        C64::new(n1 / 2.0, -n2 / 2.0),
        C64::new(n1 / 2.0, n2 / 2.0),
        C64::new((1.0 - n3) / 2.0, 0.0),
    );
    DensityMatrix {
        op,
        dims: DimFactorization::qubits(1),
    }
}

/// `|Φ⁺⟩⟨Φ⁺|` on `d ⊗ d` with `|Φ⁺⟩ = Σ_i |ii⟩ / √d`.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::arg(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let dims = DimFactorization::new(vec![d, d])?;
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut ket = vec![ZERO; d * d];
    for i in 0..d {
        ket[dims.index(&[i, i])] = amp;
    }
    Ok(DensityMatrix {
        op: ComplexMatrix::outer(&ket),
        dims,
    })
}

/// `|Ψ⁻⟩ = (|01⟩ − |10⟩) / √2`.
pub fn singlet_ket() -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO]
}

/// `v |Ψ⁻⟩⟨Ψ⁻| + (1 − v) I₄ / 4`.
pub fn werner_state(v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::arg(format!("Werner parameter {v} outside [0, 1]")));
    }
    let singlet = ComplexMatrix::outer(&singlet_ket());
    let op = &singlet.scale_real(v) + &ComplexMatrix::identity(4).scale_real((1.0 - v) / 4.0);
    Ok(DensityMatrix {
        op,
        dims: DimFactorization::qubits(2),
    })
}

/// Outcome of the partial-transpose test on a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptVerdict {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// Positive-partial-transpose test; for two qubits this decides separability.
pub fn is_ppt(rho: &DensityMatrix) -> Result<PptVerdict> {
    if rho.dims().factors() != [2, 2] {
        return Err(Error::dim(format!(
            "PPT verdict implemented for 2x2 only, got {:?}",
            rho.dims().factors()
        )));
    }
    ppt_of_operator(rho.op())
}

/// PPT test on an arbitrary Hermitian two-qubit operator (not necessarily normalized).
pub(crate) fn ppt_of_operator(op: &ComplexMatrix) -> Result<PptVerdict> {
    let pt = partial_transpose(op, &DimFactorization::qubits(2), 1)?;
    let min_eigenvalue = hermitian_eigenvalues(&pt)?[0];
    Ok(PptVerdict {
        ppt: min_eigenvalue >= tol::PSD,
        min_eigenvalue,
    })
}

/// Hilbert–Schmidt random state `G G† / Tr(G G†)` from a Ginibre matrix.
pub fn random_density(d: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(d, &mut SeededRng::new(seed))
}

pub fn random_density_with(d: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    if !(2..=8).contains(&d) {
        return Err(Error::arg(format!("random states supported for 2 <= d <= 8, got {d}")));
    }
    let g = rng.ginibre(d);
    let ggd = &g * &g.dagger();
    DensityMatrix::from_psd(&ggd, DimFactorization::single(d)?)
}

/// Phase rule for the state orthogonal to a qubit `a|0⟩ + b|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerpConvention {
    /// `b*|0⟩ − a*|1⟩`
    #[default]
    ConjSwap,
    /// `−b*|0⟩ + a*|1⟩`
    NegConjSwap,
    /// `i(b*|0⟩ − a*|1⟩)`
    IConjSwap,
    /// `−i(b*|0⟩ − a*|1⟩)`
    NegIConjSwap,
}

impl PerpConvention {
    pub const ALL: [PerpConvention; 4] = [
        PerpConvention::ConjSwap,
        PerpConvention::NegConjSwap,
        PerpConvention::IConjSwap,
        PerpConvention::NegIConjSwap,
    ];

    fn phase(self) -> C64 {
        match self {
            PerpConvention::ConjSwap => ONE,
            PerpConvention::NegConjSwap => -ONE,
            PerpConvention::IConjSwap => C64::new(0.0, 1.0),
            PerpConvention::NegIConjSwap => C64::new(0.0, -1.0),
        }
    }
}

/// Normalized single-qubit ket in canonical phase: the first amplitude is
/// real and non-negative (the second is real and positive when the first
/// vanishes). This is `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` for Bloch angles θ, φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubit {
    amp: [C64; 2],
}

impl PureQubit {
    pub fn from_bloch(n: &BlochVector) -> Result<Self> {
        if (n.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::arg(format!(
                "pure qubit needs a unit Bloch vector, got length {}",
                n.norm()
            )));
        }
        Self::from_density(&bloch_state(n))
    }

    /// Extract the ket of a pure qubit state.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::dim("pure qubit extraction needs a 2x2 state"));
        }
        let purity = rho.purity();
        if (purity - 1.0).abs() > tol::PURITY {
            return Err(Error::arg(format!("state is not pure (purity {purity})")));
        }
        let op = rho.op();
        let p0 = op.get(0, 0).re.max(0.0);
        let amp = if p0 > 1e-12 {
            let a = p0.sqrt();
            [C64::new(a, 0.0), op.get(1, 0) / a]
        } else {
            [ZERO, ONE]
        };
        Ok(Self::normalized(amp))
    }

    pub fn from_amplitudes(a: C64, b: C64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n < 1e-12 {
            return Err(Error::arg("zero ket"));
        }
        Ok(Self::normalized([a / n, b / n]))
    }

    fn normalized(amp: [C64; 2]) -> Self {
        let n = (amp[0].norm_sqr() + amp[1].norm_sqr()).sqrt();
        Self {
            amp: [amp[0] / n, amp[1] / n],
        }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amp
    }

    pub fn orthogonal(&self, conv: PerpConvention) -> PureQubit {
        let [a, b] = self.amp;
        let ph = conv.phase();
        PureQubit {
            amp: [ph * b.conj(), -ph * a.conj()],
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amp)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            op: self.projector(),
            dims: DimFactorization::qubits(1),
        }
    }

    /// `⟨ψ|M|ψ⟩`, real part.
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        let mv = m.apply(&self.amp).expect("2x2 operator");
        self.amp
            .iter()
            .zip(&mv)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re
    }

    pub fn bloch(&self) -> BlochVector {
        BlochVector::of_state(&self.density()).expect("pure qubit state")
    }
}

/// Eigen-spectrum helper for states: eigenvalues ascending.
pub fn spectrum(rho: &DensityMatrix) -> Vec<f64> {
    hermitian_eigen(rho.op()).expect("states are Hermitian").values
}

impl ComplexMatrix {
    pub(crate) fn from_parts_2x2(a: C64, b: C64, c: C64, d: C64) -> Self {
        ComplexMatrix::new(2, 2, vec![a, b, c, d]).expect("finite 2x2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S3: f64 = 0.577_350_269_189_625_8; // 1/√3

    #[test]
    fn bloch_examples() {
        let mixed = bloch_state(&BlochVector::origin());
        assert_eq!(mixed.op(), &ComplexMatrix::identity(2).scale_real(0.5));
        let up = bloch_state(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert_eq!(up.op(), &ComplexMatrix::diag_real(&[1.0, 0.0]));

        let n = bloch_state(&BlochVector::new(S3, S3, S3).unwrap());
        let k = 1.0 / (2.0 * 3f64.sqrt());
        assert!((n.op().get(0, 0).re - (0.5 + k)).abs() < 1e-15);
        assert!((n.op().get(1, 1).re - (0.5 - k)).abs() < 1e-15);
        assert!((n.op().get(0, 1) - C64::new(k, -k)).norm() < 1e-15);
        assert!((n.op().get(1, 0) - C64::new(k, k)).norm() < 1e-15);
        assert!((n.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_rejects_long_vectors() {
        assert!(BlochVector::new(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn bloch_reflection_identity() {
        let n = BlochVector::new(0.2, -0.5, 0.4).unwrap();
        let sum = bloch_state(&n).op() + bloch_state(&n.neg()).op();
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-15);
    }

    #[test]
    fn max_entangled_layout_and_marginals() {
        let phi = max_entangled(2).unwrap();
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((phi.op().get(r, c).re - 0.5).abs() < 1e-15);
        }
        assert!((phi.purity() - 1.0).abs() < 1e-14);
        for keep in [0, 1] {
            let m = phi.reduce(&[keep]).unwrap();
            assert!(m.op().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)).unwrap() < 1e-15);
        }
        let phi3 = max_entangled(3).unwrap();
        let m = phi3.reduce(&[1]).unwrap();
        assert!(m.op().max_abs_diff(&ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).unwrap() < 1e-15);
        assert!(max_entangled(1).is_err());
    }

    #[test]
    fn werner_endpoints_and_domain() {
        assert_eq!(werner_state(0.0).unwrap().op(), &ComplexMatrix::identity(4).scale_real(0.25));
        let w1 = werner_state(1.0).unwrap();
        assert!(w1.op().max_abs_diff(&ComplexMatrix::outer(&singlet_ket())).unwrap() < 1e-15);
        let ev = spectrum(&w1);
        for (got, want) in ev.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(werner_state(1.2).is_err());
        assert!(werner_state(-0.1).is_err());
    }

    #[test]
    fn werner_ppt_boundary_and_examples() {
        let b = is_ppt(&werner_state(1.0 / 3.0).unwrap()).unwrap();
        assert!(b.min_eigenvalue.abs() < 1e-10);
        let half = is_ppt(&werner_state(0.5).unwrap()).unwrap();
        assert!(!half.ppt);
        assert!((half.min_eigenvalue + 0.125).abs() < 1e-12);
        assert!(is_ppt(&werner_state(0.2).unwrap()).unwrap().ppt);
    }

    #[test]
    fn singlet_partial_transpose_spectrum() {
        let pt = partial_transpose(
            &ComplexMatrix::outer(&singlet_ket()),
            &DimFactorization::qubits(2),
            1,
        )
        .unwrap();
        let ev = hermitian_eigenvalues(&pt).unwrap();
        for (got, want) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn product_states_are_ppt() {
        let a = random_density(2, 1).unwrap();
        let b = random_density(2, 2).unwrap();
        assert!(is_ppt(&a.tensor(&b).unwrap()).unwrap().ppt);
    }

    #[test]
    fn ppt_rejects_wrong_dims() {
        let r = random_density(4, 3).unwrap();
        assert!(matches!(is_ppt(&r), Err(Error::Dimension(_))));
    }

    #[test]
    fn random_density_is_seeded() {
        let a = random_density(3, 42).unwrap();
        let b = random_density(3, 42).unwrap();
        let c = random_density(3, 43).unwrap();
        assert_eq!(a, b);
        assert!(a.op().max_abs_diff(c.op()).unwrap() > 1e-6);
        assert!(random_density(9, 0).is_err());
        assert!(random_density(1, 0).is_err());
    }

    #[test]
    fn density_validation_errors() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(DensityMatrix::single(not_unit).is_err());
        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(DensityMatrix::single(negative).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]).unwrap();
        assert!(DensityMatrix::single(non_herm).is_err());
    }

    #[test]
    fn pure_qubit_round_trip_and_orthogonality() {
        let n = BlochVector::new(S3, -S3, S3).unwrap();
        let q = PureQubit::from_bloch(&n).unwrap();
        assert!(q.amplitudes()[0].im == 0.0 && q.amplitudes()[0].re >= 0.0);
        assert!(q.projector().max_abs_diff(bloch_state(&n).op()).unwrap() < 1e-14);
        for conv in PerpConvention::ALL {
            let p = q.orthogonal(conv);
            let [a, b] = q.amplitudes();
            let [c, d] = p.amplitudes();
            assert!((a.conj() * c + b.conj() * d).norm() < 1e-15);
            let nb = p.bloch().components();
            for (x, y) in nb.iter().zip(n.components()) {
                assert!((x + y).abs() < 1e-14);
            }
        }
        let south = PureQubit::from_bloch(&BlochVector::new(0.0, 0.0, -1.0).unwrap()).unwrap();
        assert_eq!(south.amplitudes(), [ZERO, ONE]);
        assert!(PureQubit::from_density(&bloch_state(&BlochVector::origin())).is_err());
    }
}
