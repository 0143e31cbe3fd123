//! Noise on the quantum inputs.
//!
//! Every family with a Kraus form is converted to a [`KrausChannel`] once,
//! so application, adjoints and certification share one code path. The
//! entangling map of [`NoiseSpec::EntanglingExample2`] is not linear on
//! arbitrary operators; it is defined only on pure product inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SeededRng;
use crate::states::{ppt_of_operator, BlochVector, DensityMatrix, PerpConvention, PureQubit};
use crate::tensor::{hermitian_eigen, hermitian_eigenvalues, pauli, ComplexMatrix, C64};
use crate::tol;

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::unchecked(kraus)?;
        let tp = ch.trace_preservation_deviation();
        if tp > tol::TRACE_PRESERVING {
            return Err(Error::Channel(format!("Σ K†K deviates from I by {tp:.3e}")));
        }
        let choi_min = ch.choi_min_eigenvalue()?;
        if choi_min < tol::PSD {
            return Err(Error::Channel(format!("Choi matrix has eigenvalue {choi_min:.3e}")));
        }
        Ok(ch)
    }

    fn unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Channel("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::dim("Kraus operators differ in shape"));
        }
        Ok(Self { kraus, d_in, d_out })
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(d)],
            d_in: d,
            d_out: d,
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `Λ₁ ⊗ Λ₂` with Kraus operators `K_a ⊗ K_b`.
    pub fn tensor(&self, other: &KrausChannel) -> Result<KrausChannel> {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b)?);
            }
        }
        Self::unchecked(kraus)
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.d_in || !rho.is_square() {
            return Err(Error::dim(format!(
                "channel input is {}x{}, expected {}",
                rho.rows(),
                rho.cols(),
                self.d_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &(&(k * rho) * &k.dagger());
        }
        Ok(out)
    }

    /// Max-entry distance of `Σ K†K` from the identity.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            sum = &sum + &(&k.dagger() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.d_in)).expect("square")
    }

    /// `Σ_{ij} |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
    pub fn choi(&self) -> Result<ComplexMatrix> {
        let n = self.d_in * self.d_out;
        let mut choi = ComplexMatrix::zeros(n, n);
        for i in 0..self.d_in {
            for j in 0..self.d_in {
                let mut eij = ComplexMatrix::zeros(self.d_in, self.d_in);
                eij.set(i, j, C64::new(1.0, 0.0));
                let block = self.apply(&eij)?;
                for r in 0..self.d_out {
                    for c in 0..self.d_out {
                        choi.set(i * self.d_out + r, j * self.d_out + c, block.get(r, c));
                    }
                }
            }
        }
        Ok(choi)
    }

    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.choi()?.hermitian_part())?[0])
    }

    pub fn adjoint(&self) -> AdjointMap {
        AdjointMap {
            kraus: self.kraus.clone(),
            d_in: self.d_out,
            d_out: self.d_in,
        }
    }
}

/// Adjoint of a channel, `O ↦ Σ K† O K`: unital but in general not trace
/// preserving. Defined by `Tr[O₁ Λ(O₂)] = Tr[Λ⁺(O₁) O₂]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointMap {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

impl AdjointMap {
    pub fn apply(&self, o: &ComplexMatrix) -> Result<ComplexMatrix> {
        if o.rows() != self.d_in || !o.is_square() {
            return Err(Error::dim(format!(
                "adjoint input is {}x{}, expected {}",
                o.rows(),
                o.cols(),
                self.d_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &(&(&k.dagger() * o) * k);
        }
        Ok(out)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }
}

/// `|Tr[O₁ Λ(O₂)] − Tr[Λ⁺(O₁) O₂]|`.
pub fn adjoint_identity_deviation(ch: &KrausChannel, o1: &ComplexMatrix, o2: &ComplexMatrix) -> Result<f64> {
    let lhs = o1.trace_product(&ch.apply(o2)?)?;
    let rhs = ch.adjoint().apply(o1)?.trace_product(o2)?;
    Ok((lhs - rhs).norm())
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("{name} = {p} is not in [0, 1]")));
    }
    Ok(())
}

/// Depolarizing qubit channel `ρ ↦ pρ + (1−p)I/2` via the four Paulis.
pub fn white_noise_kraus(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let mut kraus = vec![pauli(0).scale_real(((1.0 + 3.0 * p) / 4.0).sqrt())];
    let w = ((1.0 - p) / 4.0).sqrt();
    kraus.extend((1..=3).map(|k| pauli(k).scale_real(w)));
    KrausChannel::new(kraus)
}

/// `ρ ↦ pρ + (1−p)σ_k ρ σ_k`.
pub fn pauli_flip_kraus(k: usize, p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    if !(1..=3).contains(&k) {
        return Err(Error::arg(format!("Pauli flip index {k} is not in 1..=3")));
    }
    KrausChannel::new(vec![
        pauli(0).scale_real(p.sqrt()),
        pauli(k).scale_real((1.0 - p).sqrt()),
    ])
}

pub fn amplitude_damping_kraus(eps: f64) -> Result<KrausChannel> {
    check_probability("eps", eps)?;
    let m0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - eps).sqrt()]])?;
    let m1 = ComplexMatrix::from_real_rows(&[&[0.0, eps.sqrt()], &[0.0, 0.0]])?;
    KrausChannel::new(vec![m0, m1])
}

/// `ρ ↦ pρ + (1−p) X Tr ρ`, with the replacement part built from the
/// eigendecomposition `X = Σ λ_k |x_k⟩⟨x_k|` as `√λ_k |x_k⟩⟨j|`.
pub fn admixture_kraus(p: f64, x: &DensityMatrix) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let d = x.dim();
    let eig = hermitian_eigen(x.op())?;
    let mut kraus = vec![ComplexMatrix::identity(d).scale_real(p.sqrt())];
    for (k, &lambda) in eig.values.iter().enumerate() {
        let w = (1.0 - p) * lambda.max(0.0);
        if w <= 0.0 {
            continue;
        }
        let xk = eig.vector(k);
        for j in 0..d {
            let mut ej = vec![C64::new(0.0, 0.0); d];
            ej[j] = C64::new(1.0, 0.0);
            kraus.push(ComplexMatrix::outer_pair(&xk, &ej).scale_real(w.sqrt()));
        }
    }
    KrausChannel::new(kraus)
}

/// Pauli index set of the correlated channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PauliIndexSet {
    /// `σ₁, σ₂, σ₃`
    #[default]
    #[serde(rename = "1..3")]
    Flips,
    /// `I, σ₁, σ₂, σ₃`
    #[serde(rename = "0..3")]
    WithIdentity,
}

impl PauliIndexSet {
    pub fn indices(self) -> &'static [usize] {
        match self {
            PauliIndexSet::Flips => &[1, 2, 3],
            PauliIndexSet::WithIdentity => &[0, 1, 2, 3],
        }
    }
}

/// Weights `(1−m) p_i p_j + m p_j δ_ij` of the correlated Pauli channel,
/// indexed like `probs`.
pub fn correlated_pauli_weights(m: f64, probs: &[f64]) -> Vec<Vec<f64>> {
    probs
        .iter()
        .enumerate()
        .map(|(i, pi)| {
            probs
                .iter()
                .enumerate()
                .map(|(j, pj)| (1.0 - m) * pi * pj + if i == j { m * pj } else { 0.0 })
                .collect()
        })
        .collect()
}

pub fn correlated_pauli_kraus(m: f64, probs: &[f64], index_set: PauliIndexSet) -> Result<KrausChannel> {
    check_probability("m", m)?;
    let idx = index_set.indices();
    if probs.len() != idx.len() {
        return Err(Error::arg(format!(
            "index set {:?} needs {} probabilities, got {}",
            idx,
            idx.len(),
            probs.len()
        )));
    }
    for (k, &p) in probs.iter().enumerate() {
        check_probability(&format!("probs[{k}]"), p)?;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol::PROB_SUM {
        return Err(Error::arg(format!("probabilities sum to {total}, not 1")));
    }
    let weights = correlated_pauli_weights(m, probs);
    let mut kraus = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            let w = weights[a][b];
            if w > 0.0 {
                kraus.push(pauli(i).kron(&pauli(j))?.scale_real(w.sqrt()));
            }
        }
    }
    KrausChannel::new(kraus)
}

/// The noise families acting on the quantum inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    Identity,
    /// Local depolarizing noise with survival probabilities `p1`, `p2`.
    WhiteNoise { p1: f64, p2: f64 },
    /// Local admixture of the fixed states `x` (Alice) and `y` (Bob).
    Admixture {
        p1: f64,
        p2: f64,
        x: ComplexMatrix,
        y: ComplexMatrix,
    },
    /// Local flips `σ_i` on Alice's input and `σ_j` on Bob's.
    PauliFlip { i: usize, j: usize, p1: f64, p2: f64 },
    AmplitudeDamping { eps1: f64, eps2: f64 },
    /// Correlated Pauli (memory) channel on the joint input.
    CorrelatedPauli {
        m: f64,
        probs: Vec<f64>,
        #[serde(default)]
        index_set: PauliIndexSet,
    },
    /// Input-dependent admixture of `|θ⟩`: input `s` survives with
    /// probability `table_a[s]` (and likewise for Bob). Missing tables
    /// default to `(q, q, q, 0)` and `(0, 0, 0, q)`.
    NonUniformExample1 {
        q: f64,
        theta: BlochVector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table_a: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table_b: Option<Vec<f64>>,
    },
    /// Maps pure product inputs `|ψ_s ψ_t⟩` to
    /// `√((1+p)/2)|ψ_s ψ_t⟩ + √((1−p)/2)|ψ_s^⊥ ψ_t^⊥⟩`.
    EntanglingExample2 {
        p: f64,
        #[serde(default)]
        perp: PerpConvention,
    },
}

/// A noise specification resolved into channels for a given input family.
#[derive(Debug, Clone)]
pub enum PreparedNoise {
    Uniform(KrausChannel),
    PerPair(Vec<Vec<KrausChannel>>),
    Entangling { p: f64, perp: PerpConvention },
}

impl PreparedNoise {
    pub fn apply(&self, s: usize, t: usize, joint_input: &DensityMatrix) -> Result<DensityMatrix> {
        let out = match self {
            PreparedNoise::Uniform(ch) => ch.apply(joint_input.op())?,
            PreparedNoise::PerPair(table) => table
                .get(s)
                .and_then(|row| row.get(t))
                .ok_or_else(|| Error::arg(format!("no channel for input pair ({s}, {t})")))?
                .apply(joint_input.op())?,
            PreparedNoise::Entangling { p, perp } => entangle(*p, *perp, joint_input)?,
        };
        let tr = out.trace().re;
        if (tr - 1.0).abs() > tol::PROBABILITY {
            return Err(Error::Channel(format!("output trace {tr} deviates from 1")));
        }
        DensityMatrix::new(out, joint_input.dims().clone())
    }
}

fn entangle(p: f64, perp: PerpConvention, joint_input: &DensityMatrix) -> Result<ComplexMatrix> {
    if joint_input.dims().factors() != [2, 2] {
        return Err(Error::dim("entangling noise acts on two qubits"));
    }
    let psi_s = PureQubit::from_density(&joint_input.reduce(&[0])?)?;
    let psi_t = PureQubit::from_density(&joint_input.reduce(&[1])?)?;
    let (a, b) = (psi_s.amplitudes(), psi_t.amplitudes());
    let (ap, bp) = (psi_s.orthogonal(perp).amplitudes(), psi_t.orthogonal(perp).amplitudes());
    let (c0, c1) = (((1.0 + p) / 2.0).sqrt(), ((1.0 - p) / 2.0).sqrt());
    let mut chi = [C64::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            chi[2 * i + j] = a[i] * b[j] * c0 + ap[i] * bp[j] * c1;
        }
    }
    Ok(ComplexMatrix::outer(&chi))
}

fn local(a: KrausChannel, b: KrausChannel) -> Result<KrausChannel> {
    a.tensor(&b)
}

impl NoiseSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            NoiseSpec::Identity => "identity",
            NoiseSpec::WhiteNoise { .. } => "white_noise",
            NoiseSpec::Admixture { .. } => "admixture",
            NoiseSpec::PauliFlip { .. } => "pauli_flip",
            NoiseSpec::AmplitudeDamping { .. } => "amplitude_damping",
            NoiseSpec::CorrelatedPauli { .. } => "correlated_pauli",
            NoiseSpec::NonUniformExample1 { .. } => "non_uniform_example1",
            NoiseSpec::EntanglingExample2 { .. } => "entangling_example2",
        }
    }

    /// Same channel for every input pair.
    pub fn is_uniform(&self) -> bool {
        !matches!(
            self,
            NoiseSpec::NonUniformExample1 { .. } | NoiseSpec::EntanglingExample2 { .. }
        )
    }

    /// Acts as `Λ₁ ⊗ Λ₂`.
    pub fn is_local(&self) -> bool {
        !matches!(
            self,
            NoiseSpec::CorrelatedPauli { .. } | NoiseSpec::EntanglingExample2 { .. }
        )
    }

    /// Convenience constructor taking the admixed states as density matrices.
    pub fn admixture(p1: f64, p2: f64, x: &DensityMatrix, y: &DensityMatrix) -> Self {
        NoiseSpec::Admixture {
            p1,
            p2,
            x: x.op().clone(),
            y: y.op().clone(),
        }
    }

    /// Example-1 noise with the default probability tables.
    pub fn example1(q: f64, theta: BlochVector) -> Self {
        NoiseSpec::NonUniformExample1 {
            q,
            theta,
            table_a: None,
            table_b: None,
        }
    }

    /// The `(table_a, table_b)` survival probabilities of Example-1 noise.
    pub fn example1_tables(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            NoiseSpec::NonUniformExample1 {
                q, table_a, table_b, ..
            } => Some((
                table_a.clone().unwrap_or_else(|| vec![*q, *q, *q, 0.0]),
                table_b.clone().unwrap_or_else(|| vec![0.0, 0.0, 0.0, *q]),
            )),
            _ => None,
        }
    }

    /// The channel shared by all input pairs.
    pub fn uniform_channel(&self) -> Result<KrausChannel> {
        let qubit_state = |m: &ComplexMatrix| DensityMatrix::single(m.clone());
        match self {
            NoiseSpec::Identity => Ok(KrausChannel::identity(4)),
            NoiseSpec::WhiteNoise { p1, p2 } => local(white_noise_kraus(*p1)?, white_noise_kraus(*p2)?),
            NoiseSpec::Admixture { p1, p2, x, y } => {
                let (x, y) = (qubit_state(x)?, qubit_state(y)?);
                if x.dim() != 2 || y.dim() != 2 {
                    return Err(Error::dim("admixed states must be qubit states"));
                }
                local(admixture_kraus(*p1, &x)?, admixture_kraus(*p2, &y)?)
            }
            NoiseSpec::PauliFlip { i, j, p1, p2 } => local(pauli_flip_kraus(*i, *p1)?, pauli_flip_kraus(*j, *p2)?),
            NoiseSpec::AmplitudeDamping { eps1, eps2 } => {
                local(amplitude_damping_kraus(*eps1)?, amplitude_damping_kraus(*eps2)?)
            }
            NoiseSpec::CorrelatedPauli { m, probs, index_set } => correlated_pauli_kraus(*m, probs, *index_set),
            NoiseSpec::NonUniformExample1 { .. } | NoiseSpec::EntanglingExample2 { .. } => Err(Error::arg(format!(
                "{} noise depends on the input pair",
                self.kind_name()
            ))),
        }
    }

    /// Resolve into channels for `n_s × n_t` input pairs.
    pub fn prepare(&self, n_s: usize, n_t: usize) -> Result<PreparedNoise> {
        match self {
            NoiseSpec::NonUniformExample1 { q, theta, .. } => {
                check_probability("q", *q)?;
                let (ta, tb) = self.example1_tables().expect("example-1 spec");
                if ta.len() < n_s || tb.len() < n_t {
                    return Err(Error::arg(format!(
                        "probability tables of length ({}, {}) do not cover {n_s}x{n_t} inputs",
                        ta.len(),
                        tb.len()
                    )));
                }
                let theta = PureQubit::from_bloch(theta)?.density();
                let alice = ta[..n_s]
                    .iter()
                    .map(|&p| admixture_kraus(p, &theta))
                    .collect::<Result<Vec<_>>>()?;
                let bob = tb[..n_t]
                    .iter()
                    .map(|&p| admixture_kraus(p, &theta))
                    .collect::<Result<Vec<_>>>()?;
                let table = alice
                    .iter()
                    .map(|a| bob.iter().map(|b| a.tensor(b)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(PreparedNoise::PerPair(table))
            }
            NoiseSpec::EntanglingExample2 { p, perp } => {
                check_probability("p", *p)?;
                Ok(PreparedNoise::Entangling { p: *p, perp: *perp })
            }
            _ => Ok(PreparedNoise::Uniform(self.uniform_channel()?)),
        }
    }

    /// Kraus channel used for input pair `(s, t)`; `None` for the
    /// entangling map, which has no Kraus form on all operators.
    pub fn channel_for(&self, s: usize, t: usize) -> Result<Option<KrausChannel>> {
        match self.prepare(s + 1, t + 1)? {
            PreparedNoise::Uniform(ch) => Ok(Some(ch)),
            PreparedNoise::PerPair(mut table) => Ok(Some(table[s].swap_remove(t))),
            PreparedNoise::Entangling { .. } => Ok(None),
        }
    }

    /// `Λ^{st}(joint_input)`.
    pub fn apply(&self, s: usize, t: usize, joint_input: &DensityMatrix) -> Result<DensityMatrix> {
        if joint_input.dims().factors() != [2, 2] {
            return Err(Error::dim("noise acts on a pair of qubit inputs"));
        }
        self.prepare(s + 1, t + 1)?.apply(s, t, joint_input)
    }

    /// Representative uniform specification of every family.
    pub fn uniform_catalog() -> Vec<NoiseSpec> {
        let x = ComplexMatrix::from_rows(&[
            vec![C64::new(0.7, 0.0), C64::new(0.2, -0.1)],
            vec![C64::new(0.2, 0.1), C64::new(0.3, 0.0)],
        ])
        .expect("2x2");
        let y = ComplexMatrix::from_real_rows(&[&[0.25, 0.0], &[0.0, 0.75]]).expect("2x2");
        vec![
            NoiseSpec::Identity,
            NoiseSpec::WhiteNoise { p1: 0.7, p2: 0.4 },
            NoiseSpec::Admixture { p1: 0.6, p2: 0.3, x, y },
            NoiseSpec::PauliFlip { i: 1, j: 1, p1: 0.8, p2: 0.3 },
            NoiseSpec::PauliFlip { i: 2, j: 3, p1: 0.9, p2: 0.6 },
            NoiseSpec::AmplitudeDamping { eps1: 0.3, eps2: 0.65 },
            NoiseSpec::CorrelatedPauli {
                m: 0.4,
                probs: vec![0.5, 0.3, 0.2],
                index_set: PauliIndexSet::Flips,
            },
            NoiseSpec::CorrelatedPauli {
                m: 0.7,
                probs: vec![0.4, 0.3, 0.2, 0.1],
                index_set: PauliIndexSet::WithIdentity,
            },
        ]
    }
}

/// Outcome of the separability-preservation test on an adjoint map.
#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityVerdict {
    pub passed: bool,
    pub trials: usize,
    pub skipped: usize,
    /// Smallest partial-transpose eigenvalue over all normalized outputs.
    pub worst_pt_eigenvalue: f64,
    /// First product input whose image is not PPT.
    #[serde(skip)]
    pub counterexample: Option<ComplexMatrix>,
}

/// Sample product PSD operators `A ⊗ B`, push them through the adjoint of
/// the channel and test the normalized outputs for PPT.
pub fn adjoint_channel_preserves_separability(ch: &KrausChannel, trials: usize, seed: u64) -> Result<SeparabilityVerdict> {
    if ch.d_in() != 4 || ch.d_out() != 4 {
        return Err(Error::dim("separability test needs a 2x2 -> 2x2 channel"));
    }
    let adj = ch.adjoint();
    let samples = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::for_trial(seed, i as u64);
            let input = rng.psd(2).kron(&rng.psd(2))?;
            let out = adj.apply(&input)?;
            let tr = out.trace().re;
            if tr < 1e-12 {
                return Ok(None);
            }
            let verdict = ppt_of_operator(&out.scale_real(1.0 / tr))?;
            Ok(Some((verdict.min_eigenvalue, input)))
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped = samples.iter().filter(|s| s.is_none()).count();
    if skipped > 0 {
        log::info!("separability test skipped {skipped} zero-trace samples");
    }
    let mut worst = f64::INFINITY;
    let mut counterexample = None;
    for (ev, input) in samples.into_iter().flatten() {
        worst = worst.min(ev);
        if ev < tol::PSD && counterexample.is_none() {
            counterexample = Some(input);
        }
    }
    Ok(SeparabilityVerdict {
        passed: counterexample.is_none(),
        trials,
        skipped,
        worst_pt_eigenvalue: worst,
        counterexample,
    })
}

/// [`adjoint_channel_preserves_separability`] for a uniform noise spec.
pub fn adjoint_preserves_separability(noise: &NoiseSpec, trials: usize, seed: u64) -> Result<SeparabilityVerdict> {
    adjoint_channel_preserves_separability(&noise.uniform_channel()?, trials, seed)
}

/// Deviations collected by [`certify_channel`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelCertificate {
    pub trace_preservation: f64,
    pub choi_min_eigenvalue: f64,
    pub adjoint_identity: f64,
}

/// Trace preservation, Choi positivity and the adjoint identity on
/// `pairs` seeded random Hermitian operator pairs.
pub fn certify_channel(ch: &KrausChannel, pairs: usize, seed: u64) -> Result<ChannelCertificate> {
    let mut adjoint_identity = 0.0_f64;
    for i in 0..pairs {
        let mut rng = SeededRng::for_trial(seed, i as u64);
        let o1 = rng.hermitian(ch.d_out());
        let o2 = rng.hermitian(ch.d_in());
        adjoint_identity = adjoint_identity.max(adjoint_identity_deviation(ch, &o1, &o2)?);
    }
    Ok(ChannelCertificate {
        trace_preservation: ch.trace_preservation_deviation(),
        choi_min_eigenvalue: ch.choi_min_eigenvalue()?,
        adjoint_identity,
    })
}
