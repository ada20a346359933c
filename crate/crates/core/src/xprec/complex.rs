use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::{Real, XprecError};

/// Complex number over a [`Real`] scalar.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Complex<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    #[inline]
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }

    #[inline]
    pub fn from_real(re: R) -> Self {
        Complex { re, im: R::zero() }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Complex::new(R::from_f64(re), R::from_f64(im))
    }

    /// Point on the unit circle at angle `theta`, rounded to double.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Complex::from_f64(c, s)
    }

    #[inline]
    pub fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Complex::new(R::one(), R::zero())
    }

    pub fn i() -> Self {
        Complex::new(R::zero(), R::one())
    }

    #[inline]
    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }

    /// Modulus.
    pub fn abs(self) -> R {
        self.re.hypot(self.im)
    }

    /// `|re| + |im|`, cheap and within a factor `sqrt(2)` of the modulus.
    #[inline]
    pub fn norm1(self) -> R {
        self.re.abs() + self.im.abs()
    }

    #[inline]
    pub fn scale(self, k: R) -> Self {
        Complex::new(self.re * k, self.im * k)
    }

    #[inline]
    pub fn mul_f64(self, k: f64) -> Self {
        Complex::new(self.re.mul_f64(k), self.im.mul_f64(k))
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_nan(&self) -> bool {
        self.re.is_nan() || self.im.is_nan()
    }

    pub fn recip(self) -> Self {
        Complex::one() / self
    }

    /// Division that reports a zero divisor.
    pub fn checked_div(self, b: Self) -> Result<Self, XprecError> {
        if b.is_zero() {
            Err(XprecError::DivisionByZero)
        } else {
            Ok(self / b)
        }
    }

    pub fn powu(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Complex::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn to_c64(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Converts between precisions through the limb representation.
    pub fn convert<S: Real>(self) -> Complex<S> {
        Complex::new(S::from_limbs(self.re.limbs()), S::from_limbs(self.im.limbs()))
    }
}

impl<R: fmt::Debug> fmt::Debug for Complex<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.re, self.im)
    }
}

impl<R: Real> fmt::Display for Complex<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.re.to_decimal(), self.im.to_decimal())
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        Complex::new(self.re + b.re, self.im + b.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        Complex::new(self.re - b.re, self.im - b.im)
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        Complex::new(self.re * b.re - self.im * b.im, self.re * b.im + self.im * b.re)
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Self;

    /// Smith's algorithm: scale by the larger component of the divisor.
    fn div(self, b: Self) -> Self {
        let (a, c, d) = (self, b.re, b.im);
        if c.abs() >= d.abs() {
            if c.is_zero() {
                let inf = R::infinity();
                return Complex::new(a.re * inf, a.im * inf);
            }
            let r = d / c;
            let den = c + d * r;
            Complex::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
        } else {
            let r = c / d;
            let den = c * r + d;
            Complex::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
        }
    }
}

impl<R: Real> AddAssign for Complex<R> {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl<R: Real> SubAssign for Complex<R> {
    #[inline]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl<R: Real> MulAssign for Complex<R> {
    #[inline]
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}
