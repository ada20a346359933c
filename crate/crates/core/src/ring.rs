//! The commutative ring operations the differentiation kernels need, shared
//! by complex points and truncated series.

use crate::series::TruncatedSeries;
use crate::xprec::{Complex, Real};

/// Element of a commutative ring with unit over a working precision.
///
/// Multiplications go through [`Ring::mul_counted`] inside the kernels so
/// operation counts can be checked in tests.
pub trait Ring: Clone + Send + Sync + std::fmt::Debug {
    type Scalar: Real;

    fn mul(&self, other: &Self) -> Self;
    fn add_assign(&mut self, other: &Self);
    /// Multiplication by a small non-negative integer (exact for the
    /// exponent weights used here).
    fn mul_int(&self, k: u64) -> Self;
    /// Zero with the same shape (degree) as `self`.
    fn zero_like(&self) -> Self;
    /// Unit with the same shape as `self`.
    fn one_like(&self) -> Self;
    /// Whether `self` can be combined with coefficients of degree `d`.
    fn fits_degree(&self, d: usize) -> bool;
    /// Restriction of a coefficient series to this element type: the whole
    /// series for series arithmetic, the constant term for points.
    fn from_coefficient(c: &TruncatedSeries<Self::Scalar>) -> Self;
    /// `self * c` for a monomial coefficient `c`.
    fn mul_coefficient(&self, c: &TruncatedSeries<Self::Scalar>) -> Self;

    #[inline]
    fn mul_counted(&self, other: &Self, count: &mut u64) -> Self {
        *count += 1;
        self.mul(other)
    }
}

impl<R: Real> Ring for Complex<R> {
    type Scalar = R;

    #[inline]
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    #[inline]
    fn add_assign(&mut self, other: &Self) {
        *self += *other;
    }
    #[inline]
    fn mul_int(&self, k: u64) -> Self {
        self.mul_f64(k as f64)
    }
    fn zero_like(&self) -> Self {
        Complex::zero()
    }
    fn one_like(&self) -> Self {
        Complex::one()
    }
    fn fits_degree(&self, _d: usize) -> bool {
        true
    }
    fn from_coefficient(c: &TruncatedSeries<R>) -> Self {
        c.coeff(0)
    }
    #[inline]
    fn mul_coefficient(&self, c: &TruncatedSeries<R>) -> Self {
        *self * c.coeff(0)
    }
}

impl<R: Real> Ring for TruncatedSeries<R> {
    type Scalar = R;

    #[inline]
    fn mul(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    #[inline]
    fn add_assign(&mut self, other: &Self) {
        self.add_assign_unchecked(other);
    }
    fn mul_int(&self, k: u64) -> Self {
        self.mul_f64(k as f64)
    }
    fn zero_like(&self) -> Self {
        TruncatedSeries::zero(self.degree())
    }
    fn one_like(&self) -> Self {
        TruncatedSeries::one(self.degree())
    }
    fn fits_degree(&self, d: usize) -> bool {
        self.degree() == d
    }
    fn from_coefficient(c: &TruncatedSeries<R>) -> Self {
        c.clone()
    }
    fn mul_coefficient(&self, c: &TruncatedSeries<R>) -> Self {
        if c.coeffs()[1..].iter().all(Complex::is_zero) {
            self.scale(c.coeff(0))
        } else {
            self.mul_unchecked(c)
        }
    }
}
