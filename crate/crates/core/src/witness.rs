//! Entanglement witnesses and their decompositions into products of
//! transposed quantum-input states, `W = Σ_{s,t} β_{s,t} τ_sᵀ ⊗ ω_tᵀ`.
//!
//! Decompositions store the untransposed families `{τ_s}`, `{ω_t}`; the
//! transposes are applied when reconstructing `W`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{bloch_state, singlet_ket, BlochVector, DensityMatrix};
use crate::tensor::{pauli, ComplexMatrix, DimFactorization};
use crate::tol;

/// Hermitian operator on `d_A ⊗ d_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOperator {
    op: ComplexMatrix,
    dims: DimFactorization,
}

impl WitnessOperator {
    pub fn new(op: ComplexMatrix, dims: DimFactorization) -> Result<Self> {
        if dims.len() != 2 {
            return Err(Error::dim("witness acts on a bipartite space"));
        }
        if !op.is_square() || op.rows() != dims.total() {
            return Err(Error::dim(format!(
                "{}x{} operator does not match {:?}",
                op.rows(),
                op.cols(),
                dims.factors()
            )));
        }
        let dev = op.hermiticity_deviation();
        if dev > tol::HERMITIAN {
            return Err(Error::contract(format!("witness is not Hermitian (deviation {dev:.3e})")));
        }
        Ok(Self {
            op: op.hermitian_part(),
            dims,
        })
    }

    pub fn op(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn dims(&self) -> &DimFactorization {
        &self.dims
    }

    /// `d_A · d_B`.
    pub fn dim(&self) -> usize {
        self.dims.total()
    }
}

/// `I₄/2 − |Ψ⁻⟩⟨Ψ⁻|`, which detects Werner states with `v > 1/3`.
pub fn werner_witness() -> WitnessOperator {
    let op = &ComplexMatrix::identity(4).scale_real(0.5) - &ComplexMatrix::outer(&singlet_ket());
    WitnessOperator::new(op, DimFactorization::qubits(2)).expect("Hermitian by construction")
}

/// `Tr(W ρ)`.
pub fn expectation(w: &WitnessOperator, rho: &DensityMatrix) -> Result<f64> {
    if w.dims() != rho.dims() {
        return Err(Error::dim(format!(
            "witness on {:?} vs state on {:?}",
            w.dims().factors(),
            rho.dims().factors()
        )));
    }
    let z = w.op().trace_product(rho.op())?;
    if z.im.abs() > tol::IMAG_RESIDUE {
        return Err(Error::contract(format!(
            "Tr(Wρ) has imaginary residue {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Coefficient table `β` with the two input-state families.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessDecomposition {
    beta: Vec<Vec<f64>>,
    tau: Vec<DensityMatrix>,
    omega: Vec<DensityMatrix>,
}

impl WitnessDecomposition {
    pub fn new(beta: Vec<Vec<f64>>, tau: Vec<DensityMatrix>, omega: Vec<DensityMatrix>) -> Result<Self> {
        if tau.is_empty() || omega.is_empty() {
            return Err(Error::arg("decomposition needs nonempty input families"));
        }
        if beta.len() != tau.len() || beta.iter().any(|row| row.len() != omega.len()) {
            return Err(Error::arg(format!(
                "beta must be {}x{} to match the input families",
                tau.len(),
                omega.len()
            )));
        }
        if beta.iter().flatten().any(|b| !b.is_finite()) {
            return Err(Error::arg("beta entries must be finite"));
        }
        let da = tau[0].dim();
        let db = omega[0].dim();
        if tau.iter().any(|t| t.dim() != da) || omega.iter().any(|w| w.dim() != db) {
            return Err(Error::arg("all inputs of a family must share one dimension"));
        }
        Ok(Self { beta, tau, omega })
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn tau(&self) -> &[DensityMatrix] {
        &self.tau
    }

    pub fn omega(&self) -> &[DensityMatrix] {
        &self.omega
    }

    pub fn alice_dim(&self) -> usize {
        self.tau[0].dim()
    }

    pub fn bob_dim(&self) -> usize {
        self.omega[0].dim()
    }

    pub fn dims(&self) -> DimFactorization {
        DimFactorization::new(vec![self.alice_dim(), self.bob_dim()]).expect("input dimensions within cap")
    }

    /// Index pairs `(s, t)` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.tau.len()).flat_map(move |s| (0..self.omega.len()).map(move |t| (s, t)))
    }

    /// `τ_s ⊗ ω_t` as a joint input state.
    pub fn joint_input(&self, s: usize, t: usize) -> Result<DensityMatrix> {
        self.tau[s].tensor(&self.omega[t])
    }

    /// `Σ β_{s,t} τ_sᵀ ⊗ ω_tᵀ`.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let n = self.alice_dim() * self.bob_dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (s, t) in self.pairs() {
            let b = self.beta[s][t];
            if b == 0.0 {
                continue;
            }
            let term = self.tau[s].op().transpose().kron(&self.omega[t].op().transpose())?;
            acc = &acc + &term.scale_real(b);
        }
        Ok(acc)
    }

    pub fn witness(&self) -> Result<WitnessOperator> {
        WitnessOperator::new(self.reconstruct()?, self.dims())
    }

    /// Copy with `β[s][t]` shifted by `delta`.
    pub fn with_beta_shift(&self, s: usize, t: usize, delta: f64) -> Result<Self> {
        if s >= self.tau.len() || t >= self.omega.len() {
            return Err(Error::arg(format!("beta index ({s}, {t}) out of range")));
        }
        let mut out = self.clone();
        out.beta[s][t] += delta;
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DecompositionDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DecompositionDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// JSON document `{beta, tau, omega}` with matrices as `[re, im]` pair grids.
#[derive(Debug, Serialize, Deserialize)]
struct DecompositionDoc {
    beta: Vec<Vec<f64>>,
    tau: Vec<ComplexMatrix>,
    omega: Vec<ComplexMatrix>,
}

impl From<&WitnessDecomposition> for DecompositionDoc {
    fn from(d: &WitnessDecomposition) -> Self {
        Self {
            beta: d.beta.clone(),
            tau: d.tau.iter().map(|t| t.op().clone()).collect(),
            omega: d.omega.iter().map(|w| w.op().clone()).collect(),
        }
    }
}

impl TryFrom<DecompositionDoc> for WitnessDecomposition {
    type Error = Error;
    fn try_from(doc: DecompositionDoc) -> Result<Self> {
        let tau = doc
            .tau
            .into_iter()
            .map(DensityMatrix::single)
            .collect::<Result<Vec<_>>>()?;
        let omega = doc
            .omega
            .into_iter()
            .map(DensityMatrix::single)
            .collect::<Result<Vec<_>>>()?;
        WitnessDecomposition::new(doc.beta, tau, omega)
    }
}

/// Bloch vector `(1, 1, 1)/√3` of the seed input state.
pub fn werner_seed_bloch() -> BlochVector {
    let k = 1.0 / 3f64.sqrt();
    BlochVector::new(k, k, k).expect("unit vector")
}

/// `σ_s (I + n·σ)/2 σ_s` for `s = 0..=3` and `n = (1, 1, 1)/√3`.
pub fn werner_inputs() -> Vec<DensityMatrix> {
    let seed = bloch_state(&werner_seed_bloch());
    (0..4)
        .map(|s| {
            let p = pauli(s);
            let op = &(&p * seed.op()) * &p;
            DensityMatrix::new(op, DimFactorization::qubits(1)).expect("unitary conjugate of a state")
        })
        .collect()
}

/// The four-by-four decomposition of [`werner_witness`]: `β = 5/8` on the
/// diagonal and `−1/8` elsewhere, with identical Pauli-conjugated families.
pub fn werner_decomposition() -> WitnessDecomposition {
    let beta = (0..4)
        .map(|s| (0..4).map(|t| if s == t { 5.0 / 8.0 } else { -1.0 / 8.0 }).collect())
        .collect();
    let inputs = werner_inputs();
    WitnessDecomposition::new(beta, inputs.clone(), inputs).expect("consistent shapes")
}

/// Max-entry distance between the reconstruction of `d` and `w`.
pub fn verify_decomposition(d: &WitnessDecomposition, w: &WitnessOperator) -> Result<f64> {
    let rec = d.reconstruct()?;
    if rec.rows() != w.dim() {
        return Err(Error::arg(format!(
            "decomposition reconstructs a {}-dimensional operator, witness is {}-dimensional",
            rec.rows(),
            w.dim()
        )));
    }
    rec.max_abs_diff(w.op())
}
