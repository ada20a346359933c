//! Dense complex linear algebra at the working precision.

mod lu;
mod svd;

use std::ops::{Index, IndexMut};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::xprec::{Complex, Real};

pub use lu::{lu_factor, lu_solve, LuFactors};
pub use svd::{condition, singular_values, svd, SvdResult, SWEEP_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular: zero pivot in column {column}")]
    Singular { column: usize },
    #[error("matrix is singular to working precision (pivot ratio {ratio:e})")]
    SingularToWorkingPrecision { ratio: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("singular value iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize, best: Vec<f64> },
}

/// Row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<R>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<R>>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Real matrix from nested `f64` rows.
    pub fn from_f64_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| Complex::from_f64(rows[i][j], 0.0))
    }

    pub fn diagonal(values: &[Complex<R>]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Entries with independent standard normal real and imaginary parts.
    pub fn random_gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::from_f64(re, im)
        })
    }

    /// Random unitary matrix: Gram-Schmidt (applied twice) on a Gaussian
    /// matrix.
    pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Self {
        let mut q = Self::random_gaussian(n, n, rng);
        for j in 0..n {
            for _ in 0..2 {
                for k in 0..j {
                    let mut dot = Complex::zero();
                    for i in 0..n {
                        dot += q[(i, k)].conj() * q[(i, j)];
                    }
                    for i in 0..n {
                        let v = q[(i, k)] * dot;
                        q[(i, j)] -= v;
                    }
                }
            }
            let norm = (0..n).fold(R::zero(), |s, i| s + q[(i, j)].norm_sqr()).sqrt();
            for i in 0..n {
                q[(i, j)] = q[(i, j)].scale(norm.recip());
            }
        }
        q
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<R>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<R>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex<R>]) -> Result<Vec<Complex<R>>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, k: Complex<R>) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * k).collect() }
    }

    pub fn frobenius_norm(&self) -> R {
        vec_norm(&self.data)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> R {
        self.data.iter().fold(R::zero(), |m, a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Complex::is_finite)
    }

    pub fn convert<S: Real>(&self) -> ComplexMatrix<S> {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.convert()).collect() }
    }
}

impl<R> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Complex<R>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.cols + j]
    }
}

impl<R: std::fmt::Debug> std::fmt::Debug for ComplexMatrix<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Euclidean norm of a complex vector, scaled to avoid overflow.
pub fn vec_norm<R: Real>(x: &[Complex<R>]) -> R {
    let scale = x.iter().fold(R::zero(), |m, a| m.max(a.re.abs()).max(a.im.abs()));
    if scale.is_zero() || scale.is_infinite() {
        return scale;
    }
    let inv = scale.recip();
    let sum = x.iter().fold(R::zero(), |s, a| s + a.scale(inv).norm_sqr());
    sum.sqrt() * scale
}

/// `x - y` componentwise.
pub fn vec_sub<R: Real>(x: &[Complex<R>], y: &[Complex<R>]) -> Vec<Complex<R>> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::DoubleDouble;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = ComplexMatrix::<DoubleDouble>::random_unitary(6, &mut rng);
        let qq = q.conj_transpose().matmul(&q).unwrap();
        let err = qq.sub(&ComplexMatrix::identity(6)).unwrap().max_abs().to_f64();
        assert!(err < 1e-29, "{err}");
    }

    #[test]
    fn products_and_norms() {
        let a = ComplexMatrix::<f64>::from_f64_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let x = [Complex::from_f64(1.0, 0.0), Complex::from_f64(0.0, 1.0)];
        let y = a.mul_vec(&x).unwrap();
        assert_eq!(y, vec![Complex::from_f64(1.0, 2.0), Complex::from_f64(3.0, 4.0)]);
        assert_eq!(vec_norm::<f64>(&[Complex::from_f64(3.0, 4.0)]), 5.0);
        assert_eq!(vec_norm::<f64>(&[Complex::from_f64(3e300, 4e300)]), 5e300);
        assert!(a.mul_vec(&x[..1]).is_err());
        let at = a.conj_transpose();
        assert_eq!(at[(0, 1)], Complex::from_f64(3.0, 0.0));
    }
}
