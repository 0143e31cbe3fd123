//! Subsystem bookkeeping for operators on tensor-product spaces.
//!
//! Every composite index in this crate uses big-endian ordering: for factors
//! `[d0, d1, ..., dk]` the flat index of digits `(i0, i1, ..., ik)` is
//! `((i0 * d1 + i1) * d2 + i2) ...`, so the first factor varies slowest.
//! This matches `kron(a, b)` placing `a` on factor 0. All digit encoding and
//! decoding goes through [`DimFactorization::digits`] and
//! [`DimFactorization::index`].

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, MAX_DIM};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimFactorization {
    factors: Vec<usize>,
    total: usize,
}

impl DimFactorization {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::dim("factorization needs at least one factor"));
        }
        if factors.contains(&0) {
            return Err(Error::dim("subsystem dimensions must be positive"));
        }
        if factors.len() > 1 && factors.iter().any(|&d| d < 2) {
            return Err(Error::dim(format!(
                "multi-factor dimensions must all be >= 2, got {factors:?}"
            )));
        }
        let total = factors
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= MAX_DIM)
            .ok_or(Error::Size {
                requested: factors.iter().product(),
                cap: MAX_DIM,
            })?;
        Ok(Self { factors, total })
    }

    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    /// `n` qubit factors.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("qubit register within the dimension cap")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Decode a flat index into per-factor digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &d) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Encode per-factor digits into a flat index.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Factorization of the listed subsystems, in the given order.
    pub fn select(&self, which: &[usize]) -> Result<Self> {
        Self::new(which.iter().map(|&k| self.factors[k]).collect())
    }

    fn check_operator(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total {
            return Err(Error::dim(format!(
                "operator is {}x{} but factorization {:?} has total {}",
                m.rows(),
                m.cols(),
                self.factors,
                self.total
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for DimFactorization {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DimFactorization> for Vec<usize> {
    fn from(d: DimFactorization) -> Self {
        d.factors
    }
}

/// Reduced operator on the `keep` subsystems (kept in ascending order).
pub fn partial_trace(m: &ComplexMatrix, dims: &DimFactorization, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    if keep.is_empty() {
        return Err(Error::arg("partial trace needs a nonempty keep set"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::arg(format!(
            "subsystem {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let reduced = dims.select(&kept)?;
    let mut out = ComplexMatrix::zeros(reduced.total(), reduced.total());

    let n = dims.total();
    let row_digits: Vec<Vec<usize>> = (0..n).map(|i| dims.digits(i)).collect();
    for (r, rd) in row_digits.iter().enumerate() {
        let rk: Vec<usize> = kept.iter().map(|&k| rd[k]).collect();
        let ri = reduced.index(&rk);
        for (c, cd) in row_digits.iter().enumerate() {
            if traced.iter().any(|&t| rd[t] != cd[t]) {
                continue;
            }
            let ck: Vec<usize> = kept.iter().map(|&k| cd[k]).collect();
            *out.at_mut(ri, reduced.index(&ck)) += m.get(r, c);
        }
    }
    Ok(out)
}

/// Transpose the indices of one subsystem, leaving the others untouched.
pub fn partial_transpose(m: &ComplexMatrix, dims: &DimFactorization, subsystem: usize) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    if subsystem >= dims.len() {
        return Err(Error::arg(format!(
            "subsystem {subsystem} out of range for {} factors",
            dims.len()
        )));
    }
    let n = dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let mut rd = dims.digits(r);
        for c in 0..n {
            let mut cd = dims.digits(c);
            std::mem::swap(&mut rd[subsystem], &mut cd[subsystem]);
            out.set(dims.index(&rd), dims.index(&cd), m.get(r, c));
            std::mem::swap(&mut rd[subsystem], &mut cd[subsystem]);
        }
    }
    Ok(out)
}

/// Reorder subsystems: factor `k` of the result is factor `order[k]` of the input.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &DimFactorization,
    order: &[usize],
) -> Result<(ComplexMatrix, DimFactorization)> {
    dims.check_operator(m)?;
    let mut seen = order.to_vec();
    seen.sort_unstable();
    if seen != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::arg(format!(
            "{order:?} is not a permutation of {} subsystems",
            dims.len()
        )));
    }
    let new_dims = dims.select(order)?;
    let n = dims.total();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let d = dims.digits(i);
            let nd: Vec<usize> = order.iter().map(|&k| d[k]).collect();
            new_dims.index(&nd)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out.set(map[r], map[c], m.get(r, c));
        }
    }
    Ok((out, new_dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::matrix::{pauli, C64};

    fn singlet_projector() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(0.0, 0.0),
        ];
        ComplexMatrix::outer(&v)
    }

    #[test]
    fn factorization_invariants() {
        let d = DimFactorization::new(vec![2, 3]).unwrap();
        assert_eq!(d.total(), 6);
        assert_eq!(d.digits(5), vec![1, 2]);
        assert_eq!(d.index(&[1, 2]), 5);
        assert!(DimFactorization::new(vec![1, 2]).is_err());
        assert!(DimFactorization::new(vec![1]).is_ok());
        assert!(DimFactorization::new(vec![8, 16]).is_err());
        assert!(DimFactorization::new(vec![]).is_err());
    }

    #[test]
    fn trace_of_product_operator_factorizes() {
        let a = &pauli(1) + &pauli(3).scale_real(0.5);
        let b = &ComplexMatrix::identity(2).scale_real(2.0) + &pauli(2);
        let ab = a.kron(&b).unwrap();
        let dims = DimFactorization::qubits(2);
        let left = partial_trace(&ab, &dims, &[0]).unwrap();
        assert!(left.max_abs_diff(&a.scale(b.trace())).unwrap() < 1e-14);
        let right = partial_trace(&ab, &dims, &[1]).unwrap();
        assert!(right.max_abs_diff(&b.scale(a.trace())).unwrap() < 1e-14);
    }

    #[test]
    fn singlet_marginal_is_maximally_mixed() {
        let dims = DimFactorization::qubits(2);
        let r = partial_trace(&singlet_projector(), &dims, &[0]).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)).unwrap() < 1e-15);
    }

    #[test]
    fn tracing_identity_scales_by_dimension() {
        let dims = DimFactorization::qubits(2);
        let r = partial_trace(&ComplexMatrix::identity(4), &dims, &[1]).unwrap();
        assert_eq!(r, ComplexMatrix::identity(2).scale_real(2.0));
    }

    #[test]
    fn partial_trace_errors() {
        let dims = DimFactorization::qubits(2);
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(8), &dims, &[0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(4), &dims, &[]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn partial_transpose_of_product_transposes_one_factor() {
        let a = &pauli(1) + &pauli(2).scale_real(0.3);
        let b = &pauli(2) + &pauli(3).scale_real(0.1);
        let dims = DimFactorization::qubits(2);
        let pt = partial_transpose(&a.kron(&b).unwrap(), &dims, 1).unwrap();
        assert!(pt.max_abs_diff(&a.kron(&b.transpose()).unwrap()).unwrap() < 1e-15);
        let id = ComplexMatrix::identity(4);
        assert_eq!(partial_transpose(&id, &dims, 0).unwrap(), id);
        assert!(partial_transpose(&id, &dims, 2).is_err());
    }

    #[test]
    fn middle_factor_trace_keeps_order() {
        let a = pauli(1);
        let b = pauli(3);
        let c = pauli(2);
        let abc = a.kron(&b).unwrap().kron(&c).unwrap();
        let dims = DimFactorization::qubits(3);
        let ac = partial_trace(&abc, &dims, &[2, 0]).unwrap();
        // Tr(σ3) = 0 so build with b having nonzero trace instead.
        assert!(ac.max_abs() < 1e-15);
        let b = &ComplexMatrix::identity(2) + &pauli(3).scale_real(0.2);
        let abc = a.kron(&b).unwrap().kron(&c).unwrap();
        let ac = partial_trace(&abc, &dims, &[0, 2]).unwrap();
        assert!(ac.max_abs_diff(&a.kron(&c).unwrap().scale_real(2.0)).unwrap() < 1e-15);
    }

    #[test]
    fn permutation_moves_factors() {
        let a = pauli(1);
        let b = pauli(2);
        let c = &pauli(3) + &ComplexMatrix::identity(2);
        let dims = DimFactorization::qubits(3);
        let abc = a.kron(&b).unwrap().kron(&c).unwrap();
        let (p, nd) = permute_subsystems(&abc, &dims, &[2, 0, 1]).unwrap();
        assert_eq!(nd.factors(), &[2, 2, 2]);
        let cab = c.kron(&a).unwrap().kron(&b).unwrap();
        assert!(p.max_abs_diff(&cab).unwrap() < 1e-15);
        assert!(permute_subsystems(&abc, &dims, &[0, 0, 1]).is_err());
    }
}
