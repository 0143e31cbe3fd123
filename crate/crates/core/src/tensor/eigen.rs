//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Givens rotation in the `(p, q)` plane.
//! Sweeps stop once the off-diagonal Frobenius norm falls below
//! `OFF_DIAGONAL_TOL * max(1, ‖A‖_F)` or after `MAX_SWEEPS` sweeps.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Max-entry distance from Hermiticity accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|r| self.vectors.get(r, k)).collect()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lam = ComplexMatrix::diag_real(&self.values);
        &(&self.vectors * &lam) * &self.vectors.dagger()
    }
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(m, false)?.values)
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    jacobi(m, true)
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::contract(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::contract(format!(
            "matrix is not Hermitian (max deviation {dev:.3e})"
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, e^{-iφ}) on (p, q) followed by the real rotation:
                // J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}.
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;

                // A ← A J (columns p and q)
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * jqp);
                    a.set(k, q, akp * s + akq * jqq);
                }
                // A ← J† A (rows p and q)
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * jqp.conj());
                    a.set(q, k, apk * s + aqk * jqq.conj());
                }
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                a.set(p, p, C64::new(a.get(p, p).re, 0.0));
                a.set(q, q, C64::new(a.get(q, q).re, 0.0));

                if want_vectors {
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, vkp * c + vkq * jqp);
                        v.set(k, q, vkp * s + vkq * jqq);
                    }
                }
            }
        }
    }
    let residual = off_norm(&a);
    if residual >= threshold {
        return Err(Error::contract(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (off-diagonal {residual:.3e})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = if want_vectors {
        let mut sorted = ComplexMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                sorted.set(r, new_col, v.get(r, old_col));
            }
        }
        sorted
    } else {
        ComplexMatrix::identity(n)
    };
    Ok(HermitianEigen { values, vectors })
}
