//! Extended-precision real and complex arithmetic.
//!
//! Three working precisions share one interface, the [`Real`] trait:
//! hardware `f64`, [`DoubleDouble`] (two limbs, unit roundoff `2^-106`) and
//! [`QuadDouble`] (four limbs, unit roundoff `2^-212`). Multi-limb values are
//! unevaluated sums of non-overlapping doubles in decreasing magnitude and
//! are renormalized after every operation.

mod complex;
mod dd;
pub mod decimal;
pub mod eft;
mod qd;

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use complex::Complex;
pub use dd::DoubleDouble;
pub use qd::QuadDouble;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XprecError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value")]
    NegativeSqrt,
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
    #[error("value is not finite")]
    NonFinite,
}

/// Working precision of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Hardware double.
    D,
    /// Double-double.
    DD,
    /// Quad-double.
    QD,
}

impl Precision {
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::D => <f64 as Real>::EPSILON,
            Precision::DD => DoubleDouble::EPSILON,
            Precision::QD => QuadDouble::EPSILON,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Precision::D => "d",
            Precision::DD => "dd",
            Precision::QD => "qd",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(Precision::D),
            "dd" => Ok(Precision::DD),
            "qd" => Ok(Precision::QD),
            other => Err(format!("unknown precision {other:?}, expected d, dd or qd")),
        }
    }
}

/// A real scalar at one of the supported working precisions.
///
/// Arithmetic through the operator traits follows IEEE conventions for
/// exceptional cases (division by zero gives an infinity, `sqrt` of a
/// negative number gives NaN); use [`checked_div`] and [`checked_sqrt`] for
/// the erroring variants.
pub trait Real:
    Copy
    + Default
    + Send
    + Sync
    + 'static
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    const LEVEL: Precision;
    /// Unit roundoff.
    const EPSILON: f64;
    /// Number of hardware doubles per value.
    const LIMBS: usize;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Leading limb (the value rounded to a double).
    fn to_f64(self) -> f64;
    fn limbs(&self) -> &[f64];
    /// Builds a value from up to `LIMBS` doubles and renormalizes.
    fn from_limbs(limbs: &[f64]) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    /// Multiplication by a hardware double.
    fn mul_f64(self, k: f64) -> Self;

    fn epsilon() -> Self {
        Self::from_f64(Self::EPSILON)
    }

    /// Nearest value to an exact rational.
    fn from_rational(r: &num_rational::BigRational) -> Self {
        Self::from_limbs(&decimal::rational_to_limbs(r, Self::LIMBS))
    }

    fn from_i64(k: i64) -> Self {
        // exact for |k| < 2^53, which covers every use in this crate
        Self::from_f64(k as f64)
    }

    fn infinity() -> Self {
        Self::from_f64(f64::INFINITY)
    }

    fn nan() -> Self {
        Self::from_f64(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        self.to_f64() == 0.0
    }

    fn is_nan(&self) -> bool {
        self.limbs().iter().any(|x| f64::is_nan(*x))
    }

    fn is_finite(&self) -> bool {
        self.to_f64().is_finite()
    }

    fn is_infinite(&self) -> bool {
        self.to_f64().is_infinite()
    }

    fn is_sign_negative(&self) -> bool {
        self.to_f64() < 0.0
    }

    fn recip(self) -> Self {
        Self::one() / self
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn max(self, other: Self) -> Self {
        if other > self || self.is_nan() {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self || self.is_nan() {
            other
        } else {
            self
        }
    }

    /// `sqrt(self^2 + other^2)` without intermediate overflow.
    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return Self::zero();
        }
        if big.is_infinite() {
            return big;
        }
        // scale by a power of two so the squares stay in range; exact
        let scale = pow2_near(big.to_f64());
        let big = big.mul_f64(1.0 / scale);
        let small = small.mul_f64(1.0 / scale);
        (big * big + small * small).sqrt().mul_f64(scale)
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut acc = Self::one();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Decimal logarithm of `|self|`, accurate to double precision.
    fn log10(self) -> f64 {
        self.to_f64().abs().log10()
    }

    /// Parses a decimal string, rounding to the nearest representable value.
    fn parse_decimal(s: &str) -> Result<Self, XprecError> {
        let r = decimal::parse_rational(s)?;
        Ok(Self::from_limbs(&decimal::rational_to_limbs(&r, Self::LIMBS)))
    }

    /// Shortest decimal string that parses back to exactly this value.
    fn to_decimal(&self) -> String {
        decimal::format_shortest(self.limbs(), Self::LIMBS)
    }

    /// Decimal string with `digits` significant digits.
    fn to_decimal_digits(&self, digits: usize) -> String {
        decimal::format_limbs(self.limbs(), digits)
    }
}

fn pow2_near(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 || !x.is_finite() {
        return 1.0;
    }
    let e = x.log2().floor() as i32;
    2f64.powi(e.clamp(-1000, 1000))
}

/// Division that reports a zero divisor instead of producing an infinity.
pub fn checked_div<R: Real>(a: R, b: R) -> Result<R, XprecError> {
    if b.is_zero() {
        Err(XprecError::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

/// Square root that rejects negative arguments.
pub fn checked_sqrt<R: Real>(a: R) -> Result<R, XprecError> {
    if a.is_sign_negative() && !a.is_zero() {
        Err(XprecError::NegativeSqrt)
    } else {
        Ok(a.sqrt())
    }
}

impl Real for f64 {
    const LEVEL: Precision = Precision::D;
    const EPSILON: f64 = 1.1102230246251565e-16; // 2^-53
    const LIMBS: usize = 1;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    fn limbs(&self) -> &[f64] {
        std::slice::from_ref(self)
    }
    fn from_limbs(limbs: &[f64]) -> Self {
        limbs.iter().sum()
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn mul_f64(self, k: f64) -> Self {
        self * k
    }
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
}
