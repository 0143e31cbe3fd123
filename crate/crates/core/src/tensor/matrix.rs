use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest row or column count any constructed operator may have.
pub const MAX_DIM: usize = 64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!("empty matrix shape {rows}x{cols}")));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::Size {
                requested: rows.max(cols),
                cap: MAX_DIM,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for shapes that are known valid.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_parts(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::dim("ragged rows"));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Rank-one projector `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &[C64]) -> Self {
        Self::outer_pair(v, v)
    }

    /// `|u⟩⟨v|`.
    pub fn outer_pair(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m.data[i * v.len() + j] = a * b.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: C64) {
        self.data[r * self.cols + c] = value;
    }

    #[inline]
    pub(crate) fn at_mut(&mut self, r: usize, c: usize) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z.conj()).collect(),
        )
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::from_parts(self.rows, self.cols, self.data.iter().map(|z| z * k).collect())
    }

    pub fn scale_real(&self, k: f64) -> Self {
        Self::from_parts(self.rows, self.cols, self.data.iter().map(|z| z * k).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (c, b) in row.iter().enumerate() {
                    out.data[r * other.cols + c] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::dim(format!(
                "Tr(AB) needs compatible shapes, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = ZERO;
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self.get(r, k) * other.get(k, r);
            }
        }
        Ok(acc)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Kronecker product, bounded by [`MAX_DIM`].
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::Size {
                requested: rows.max(cols),
                cap: MAX_DIM,
            });
        }
        let mut out = Self::zeros(rows, cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self.get(ar, ac);
                if a == ZERO {
                    continue;
                }
                for br in 0..other.rows {
                    for bc in 0..other.cols {
                        out.data[(ar * other.rows + br) * cols + ac * other.cols + bc] =
                            a * other.get(br, bc);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry distance between the matrix and its conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dagger();
        self.zip_with(&d, |a, b| (a + b) * 0.5)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self::from_parts(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        )
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator sugar for same-shape arithmetic. Shapes are validated by the
// `try_*` forms; these panic on mismatch and are meant for internal code
// where shapes are fixed by construction.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix shapes must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix shapes must agree")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("inner dimensions must agree")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// JSON form: array of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| {
                        let z = self.get(r, c);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// The single-qubit Pauli operators, indexed 0..=3 with index 0 the identity.
pub fn pauli(index: usize) -> ComplexMatrix {
    let d = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {index} out of range 0..=3"),
    };
    ComplexMatrix::from_parts(2, 2, d.to_vec())
}
