use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::eft::{quick_two_sum, two_prod, two_sqr, two_sum};
use super::{Precision, Real};

/// Double-double: `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble([f64; 2]);

impl DoubleDouble {
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        Self::normalized(hi, lo)
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.0[1]
    }

    #[inline]
    fn normalized(a: f64, b: f64) -> Self {
        if !a.is_finite() {
            return DoubleDouble([a, 0.0]);
        }
        let (s, e) = quick_two_sum(a, b);
        if s.is_finite() {
            DoubleDouble([s, e])
        } else {
            DoubleDouble([s, 0.0])
        }
    }

    /// Rounds `hi + lo` back into canonical form.
    pub fn normalize(self) -> Self {
        Self::normalized(self.0[0], self.0[1])
    }

    #[inline]
    fn add_f64(self, b: f64) -> Self {
        let (s1, s2) = two_sum(self.0[0], b);
        Self::normalized(s1, s2 + self.0[1])
    }

    #[inline]
    fn mul_by_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.0[0], b);
        Self::normalized(p1, p2 + self.0[1] * b)
    }

    #[inline]
    fn square(self) -> Self {
        let (p1, p2) = two_sqr(self.0[0]);
        let p2 = p2 + 2.0 * self.0[0] * self.0[1] + self.0[1] * self.0[1];
        Self::normalized(p1, p2)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e}, {:e})", self.0[0], self.0[1])
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_decimal_digits(p.max(1))),
            None => f.write_str(&self.to_decimal()),
        }
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.0[0].partial_cmp(&other.0[0])? {
            Ordering::Equal => self.0[1].partial_cmp(&other.0[1]),
            ord => Some(ord),
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.0[0], b.0[0]);
        if !s1.is_finite() {
            return DoubleDouble([s1, 0.0]);
        }
        let (t1, t2) = two_sum(self.0[1], b.0[1]);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::normalized(s1, s2 + t2)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble([-self.0[0], -self.0[1]])
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.0[0], b.0[0]);
        let p2 = p2 + (self.0[0] * b.0[1] + self.0[1] * b.0[0]);
        Self::normalized(p1, p2)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.0[0] / b.0[0];
        if !q1.is_finite() {
            return DoubleDouble([q1, 0.0]);
        }
        let r = self - b.mul_by_f64(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_by_f64(q2);
        let q3 = r.0[0] / b.0[0];
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble([q1, q2]).add_f64(q3)
    }
}

macro_rules! assign_ops {
    ($t:ty) => {
        impl std::ops::AddAssign for $t {
            #[inline]
            fn add_assign(&mut self, b: Self) {
                *self = *self + b;
            }
        }
        impl std::ops::SubAssign for $t {
            #[inline]
            fn sub_assign(&mut self, b: Self) {
                *self = *self - b;
            }
        }
        impl std::ops::MulAssign for $t {
            #[inline]
            fn mul_assign(&mut self, b: Self) {
                *self = *self * b;
            }
        }
        impl std::ops::DivAssign for $t {
            #[inline]
            fn div_assign(&mut self, b: Self) {
                *self = *self / b;
            }
        }
    };
}
pub(super) use assign_ops;

assign_ops!(DoubleDouble);

impl Real for DoubleDouble {
    const LEVEL: Precision = Precision::DD;
    const EPSILON: f64 = 1.232595164407831e-32; // 2^-106
    const LIMBS: usize = 2;

    #[inline]
    fn zero() -> Self {
        DoubleDouble([0.0, 0.0])
    }
    #[inline]
    fn one() -> Self {
        DoubleDouble([1.0, 0.0])
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble([x, 0.0])
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.0[0]
    }
    fn limbs(&self) -> &[f64] {
        &self.0
    }
    fn from_limbs(limbs: &[f64]) -> Self {
        let mut acc = Self::zero();
        for &l in limbs {
            acc = acc.add_f64(l);
        }
        acc
    }
    #[inline]
    fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        let a = self.0[0];
        if a == 0.0 {
            return Self::zero();
        }
        if a < 0.0 {
            return Self::nan();
        }
        if !a.is_finite() {
            return DoubleDouble([a.sqrt(), 0.0]);
        }
        // one Newton step on 1/sqrt from the hardware estimate
        let x = 1.0 / a.sqrt();
        let ax = a * x;
        let (s1, s2) = two_sqr(ax);
        let residual = (self - DoubleDouble([s1, s2])).0[0];
        let (h, l) = two_sum(ax, residual * (x * 0.5));
        Self::normalized(h, l)
    }
    #[inline]
    fn mul_f64(self, k: f64) -> Self {
        self.mul_by_f64(k)
    }
    fn sqr(self) -> Self {
        self.square()
    }
}
