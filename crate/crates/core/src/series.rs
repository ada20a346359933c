//! Complex power series truncated at a fixed degree.

use std::fmt;

use thiserror::Error;

use crate::xprec::{Complex, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("operation needs degree at least {needed}, got {got}")]
    DegreeTooLow { needed: usize, got: usize },
}

/// `c_0 + c_1 t + ... + c_d t^d`. The coefficient vector always has length
/// `degree + 1`; binary operations on different degrees are errors.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<R> {
    coeffs: Vec<Complex<R>>,
}

impl<R: Real> TruncatedSeries<R> {
    pub fn new(coeffs: Vec<Complex<R>>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        TruncatedSeries { coeffs: vec![Complex::zero(); degree + 1] }
    }

    pub fn one(degree: usize) -> Self {
        Self::constant(Complex::one(), degree)
    }

    pub fn constant(c: Complex<R>, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = c;
        s
    }

    /// `c0 + c1 t`.
    pub fn linear(c0: Complex<R>, c1: Complex<R>, degree: usize) -> Self {
        let mut s = Self::constant(c0, degree);
        if degree >= 1 {
            s.coeffs[1] = c1;
        }
        s
    }

    /// Builds a series from real `f64` coefficients, padding or truncating
    /// to `degree`.
    pub fn from_f64s(values: &[f64], degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for (c, &v) in s.coeffs.iter_mut().zip(values) {
            *c = Complex::from_f64(v, 0.0);
        }
        s
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex<R>] {
        &mut self.coeffs
    }

    #[inline]
    pub fn coeff(&self, k: usize) -> Complex<R> {
        self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<Complex<R>> {
        self.coeffs
    }

    #[inline]
    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.degree() != other.degree() {
            Err(SeriesError::DegreeMismatch(self.degree(), other.degree()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Truncated product: `c_k = sum_{j<=k} a_j b_{k-j}` for `k <= d`.
    pub fn convolve(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Product without the degree check; callers guarantee equal degrees.
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.degree();
        debug_assert_eq!(d, other.degree());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=d)
            .map(|k| {
                let mut acc = a[0] * b[k];
                for j in 1..=k {
                    acc += a[j] * b[k - j];
                }
                acc
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        debug_assert_eq!(self.degree(), other.degree());
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn scale(&self, k: Complex<R>) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn mul_f64(&self, k: f64) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|&c| c.mul_f64(k)).collect() }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }

    /// Horner evaluation at `t`.
    pub fn eval(&self, t: Complex<R>) -> Complex<R> {
        let mut acc = self.coeffs[self.degree()];
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = acc * t + c;
        }
        acc
    }

    /// Series of `s(t + delta)` truncated at the same degree, by repeated
    /// synthetic division. After the shift, evaluating at `t = 0` gives
    /// `s(delta)`.
    pub fn shift(&self, delta: Complex<R>) -> Self {
        if delta.is_zero() {
            return self.clone();
        }
        let mut a = self.coeffs.clone();
        let d = self.degree();
        for i in 0..d {
            for j in (i..d).rev() {
                let carry = a[j + 1] * delta;
                a[j] += carry;
            }
        }
        TruncatedSeries { coeffs: a }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> R {
        self.coeffs.iter().fold(R::zero(), |m, c| m.max(c.abs()))
    }

    /// Ratio estimate of the nearest singularity: `z = c_{d-1} / c_d` and
    /// `R = |z|`.
    ///
    /// When `|c_d|` is below `sqrt(eps) * max_k |c_k|` the last coefficient
    /// is noise and the estimate reports no singularity (`z = None`,
    /// `radius = +inf`).
    pub fn fabry_ratio(&self) -> Result<FabryEstimate<R>, SeriesError> {
        let d = self.degree();
        if d < 1 {
            return Err(SeriesError::DegreeTooLow { needed: 1, got: d });
        }
        let last = self.coeffs[d];
        let tiny = R::from_f64(R::EPSILON.sqrt()) * self.max_abs();
        let last_abs = last.abs();
        if last_abs.is_zero() || last_abs < tiny {
            return Ok(FabryEstimate { z: None, radius: R::infinity() });
        }
        let z = self.coeffs[d - 1] / last;
        Ok(FabryEstimate { radius: z.abs(), z: Some(z) })
    }
}

/// Output of the ratio test on one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabryEstimate<R> {
    /// Estimated location of the nearest singular parameter value.
    pub z: Option<Complex<R>>,
    /// Estimated radius of convergence; `+inf` when nothing was detected.
    pub radius: R,
}

/// Ratio estimate over a vector of series: the component with the smallest
/// radius binds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorFabry<R> {
    pub estimate: FabryEstimate<R>,
    /// Index of the binding component, `None` if no component detected a
    /// singularity.
    pub component: Option<usize>,
}

pub fn vector_fabry<R: Real>(v: &[TruncatedSeries<R>]) -> Result<VectorFabry<R>, SeriesError> {
    let first = v.first().ok_or(SeriesError::Empty)?;
    let mut best = VectorFabry { estimate: FabryEstimate { z: None, radius: R::infinity() }, component: None };
    for (i, s) in v.iter().enumerate() {
        first.check(s)?;
        let e = s.fabry_ratio()?;
        if e.z.is_some() && (best.component.is_none() || e.radius < best.estimate.radius) {
            best = VectorFabry { estimate: e, component: Some(i) };
        }
    }
    Ok(best)
}

impl<R: fmt::Debug> fmt::Debug for TruncatedSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
