use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::dd::assign_ops;
use super::eft::{quick_two_sum, three_sum, three_sum2, two_prod, two_sum};
use super::{Precision, Real};

/// Quad-double: four non-overlapping limbs in decreasing magnitude.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct QuadDouble([f64; 4]);

/// Renormalizes a four-term expansion.
fn renorm4(c: [f64; 4]) -> [f64; 4] {
    if !c[0].is_finite() {
        return [c[0], 0.0, 0.0, 0.0];
    }
    let (s, c3) = quick_two_sum(c[2], c[3]);
    let (s, c2) = quick_two_sum(c[1], s);
    let (c0, c1) = quick_two_sum(c[0], s);

    let (mut s0, mut s1, mut s2, mut s3) = (c0, c1, 0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
        }
    }
    settle([s0, s1, s2, s3])
}

/// Renormalizes a five-term expansion down to four limbs.
fn renorm5(c: [f64; 5]) -> [f64; 4] {
    if !c[0].is_finite() {
        return [c[0], 0.0, 0.0, 0.0];
    }
    let (s, c4) = quick_two_sum(c[3], c[4]);
    let (s, c3) = quick_two_sum(c[2], s);
    let (s, c2) = quick_two_sum(c[1], s);
    let (c0, c1) = quick_two_sum(c[0], s);

    let (mut s0, mut s1, mut s2, mut s3) = (c0, c1, 0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                s2 += c4;
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    settle([s0, s1, s2, s3])
}

/// Top-down passes until each limb is at most half an ulp of its
/// predecessor. Usually a no-op or a single pass.
#[inline]
fn settle(mut s: [f64; 4]) -> [f64; 4] {
    for _ in 0..4 {
        let before = s;
        (s[0], s[1]) = quick_two_sum(s[0], s[1]);
        (s[1], s[2]) = quick_two_sum(s[1], s[2]);
        (s[2], s[3]) = quick_two_sum(s[2], s[3]);
        if s == before {
            break;
        }
    }
    s
}

/// Adds `u, v, c` where `(u, v)` is a double-length accumulator; returns a
/// finished limb or zero if the accumulator absorbed it.
#[inline]
fn quick_three_accum(a: &mut f64, b: &mut f64, c: f64) -> f64 {
    let (s, bb) = two_sum(*b, c);
    let (s, aa) = two_sum(*a, s);
    let za = aa != 0.0;
    let zb = bb != 0.0;
    if za && zb {
        *a = aa;
        *b = bb;
        return s;
    }
    if !zb {
        *b = aa;
        *a = s;
    } else {
        *b = bb;
        *a = s;
    }
    0.0
}

impl QuadDouble {
    pub fn new(limbs: [f64; 4]) -> Self {
        QuadDouble(renorm4(limbs))
    }

    /// Renormalizes the limbs.
    pub fn normalize(self) -> Self {
        QuadDouble(renorm4(self.0))
    }

    fn add_f64(self, b: f64) -> Self {
        let a = &self.0;
        let (c0, e) = two_sum(a[0], b);
        if !c0.is_finite() {
            return QuadDouble([c0, 0.0, 0.0, 0.0]);
        }
        let (c1, e) = two_sum(a[1], e);
        let (c2, e) = two_sum(a[2], e);
        let (c3, e) = two_sum(a[3], e);
        QuadDouble(renorm5([c0, c1, c2, c3, e]))
    }

    fn mul_by_f64(self, b: f64) -> Self {
        let a = &self.0;
        let (p0, q0) = two_prod(a[0], b);
        if !p0.is_finite() {
            return QuadDouble([p0, 0.0, 0.0, 0.0]);
        }
        let (p1, mut q1) = two_prod(a[1], b);
        let (mut p2, mut q2) = two_prod(a[2], b);
        let p3 = a[3] * b;

        let s0 = p0;
        let (s1, mut s2) = two_sum(q0, p1);
        three_sum(&mut s2, &mut q1, &mut p2);
        three_sum2(&mut q1, &mut q2, p3);
        let s3 = q1;
        let s4 = q2 + p2;
        QuadDouble(renorm5([s0, s1, s2, s3, s4]))
    }
}

impl fmt::Debug for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadDouble({:e}, {:e}, {:e}, {:e})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Display for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_decimal_digits(p.max(1))),
            None => f.write_str(&self.to_decimal()),
        }
    }
}

impl PartialOrd for QuadDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        for i in 0..4 {
            match self.0[i].partial_cmp(&other.0[i])? {
                Ordering::Equal => continue,
                ord => return Some(ord),
            }
        }
        Some(Ordering::Equal)
    }
}

impl Neg for QuadDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        QuadDouble([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for QuadDouble {
    type Output = Self;

    /// Merges the limbs of both operands by decreasing magnitude into a
    /// double-length accumulator.
    fn add(self, other: Self) -> Self {
        let a = &self.0;
        let b = &other.0;
        if !(a[0] + b[0]).is_finite() {
            return QuadDouble([a[0] + b[0], 0.0, 0.0, 0.0]);
        }
        let mut x = [0.0f64; 4];
        let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);

        let mut u = if a[i].abs() > b[j].abs() {
            i += 1;
            a[0]
        } else {
            j += 1;
            b[0]
        };
        let mut v = if a[i].abs() > b[j].abs() {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        (u, v) = quick_two_sum(u, v);

        while k < 4 {
            if i >= 4 && j >= 4 {
                x[k] = u;
                if k < 3 {
                    k += 1;
                    x[k] = v;
                }
                break;
            }
            let t = if i >= 4 {
                j += 1;
                b[j - 1]
            } else if j >= 4 || a[i].abs() > b[j].abs() {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
            let s = quick_three_accum(&mut u, &mut v, t);
            if s != 0.0 {
                x[k] = s;
                k += 1;
            }
        }
        for &ak in &a[i..] {
            x[3] += ak;
        }
        for &bk in &b[j..] {
            x[3] += bk;
        }
        QuadDouble(renorm4(x))
    }
}

impl Sub for QuadDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for QuadDouble {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        let a = &self.0;
        let b = &other.0;

        let (p0, mut q0) = two_prod(a[0], b[0]);
        if !p0.is_finite() {
            return QuadDouble([p0, 0.0, 0.0, 0.0]);
        }
        let (mut p1, mut q1) = two_prod(a[0], b[1]);
        let (mut p2, mut q2) = two_prod(a[1], b[0]);
        let (mut p3, q3) = two_prod(a[0], b[2]);
        let (mut p4, q4) = two_prod(a[1], b[1]);
        let (mut p5, q5) = two_prod(a[2], b[0]);

        // O(eps) terms
        three_sum(&mut p1, &mut p2, &mut q0);

        // O(eps^2): p2, q1, q2, p3, p4, p5 -> s0, s1, s2
        three_sum(&mut p2, &mut q1, &mut q2);
        three_sum(&mut p3, &mut p4, &mut p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;

        // O(eps^3): q0, s1, q3, q4, q5, p6..p9 -> t0, t1
        let (p6, q6) = two_prod(a[0], b[3]);
        let (p7, q7) = two_prod(a[1], b[2]);
        let (p8, q8) = two_prod(a[2], b[1]);
        let (p9, q9) = two_prod(a[3], b[0]);

        let (q0, q3) = two_sum(q0, q3);
        let (q4, q5) = two_sum(q4, q5);
        let (p6, p7) = two_sum(p6, p7);
        let (p8, p9) = two_sum(p8, p9);
        let (t0, mut t1) = two_sum(q0, q4);
        t1 += q3 + q5;
        let (r0, mut r1) = two_sum(p6, p8);
        r1 += p7 + p9;
        let (q3, mut q4) = two_sum(t0, r0);
        q4 += t1 + r1;
        let (t0, mut t1) = two_sum(q3, s1);
        t1 += q4;

        // O(eps^4)
        t1 += a[1] * b[3] + a[2] * b[2] + a[3] * b[1] + q6 + q7 + q8 + q9 + s2;

        QuadDouble(renorm5([p0, p1, s0, t0, t1]))
    }
}

impl Div for QuadDouble {
    type Output = Self;

    fn div(self, b: Self) -> Self {
        let q0 = self.0[0] / b.0[0];
        if !q0.is_finite() {
            return QuadDouble([q0, 0.0, 0.0, 0.0]);
        }
        let mut r = self - b.mul_by_f64(q0);
        let q1 = r.0[0] / b.0[0];
        r -= b.mul_by_f64(q1);
        let q2 = r.0[0] / b.0[0];
        r -= b.mul_by_f64(q2);
        let q3 = r.0[0] / b.0[0];
        r -= b.mul_by_f64(q3);
        let q4 = r.0[0] / b.0[0];
        QuadDouble(renorm5([q0, q1, q2, q3, q4]))
    }
}

assign_ops!(QuadDouble);

impl Real for QuadDouble {
    const LEVEL: Precision = Precision::QD;
    const EPSILON: f64 = 1.5192908393215678e-64; // 2^-212
    const LIMBS: usize = 4;

    #[inline]
    fn zero() -> Self {
        QuadDouble([0.0; 4])
    }
    #[inline]
    fn one() -> Self {
        QuadDouble([1.0, 0.0, 0.0, 0.0])
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        QuadDouble([x, 0.0, 0.0, 0.0])
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
        let a0 = self.0[0];
        if a0 == 0.0 {
            return Self::zero();
        }
        if a0 < 0.0 {
            return Self::nan();
        }
        if !a0.is_finite() {
            return Self::from_f64(a0.sqrt());
        }
        // Newton iteration for 1/sqrt(a), then multiply by a
        let half = Self::from_f64(0.5);
        let h = self.mul_f64(0.5);
        let mut r = Self::from_f64(1.0 / a0.sqrt());
        for _ in 0..3 {
            r += (half - h * (r * r)) * r;
        }
        r * self
    }
    #[inline]
    fn mul_f64(self, k: f64) -> Self {
        self.mul_by_f64(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limbs_stay_non_overlapping() {
        let third = QuadDouble::one() / QuadDouble::from_f64(3.0);
        let l = third.0;
        for i in 0..3 {
            assert!(l[i + 1].abs() <= 0.5 * ulp(l[i]), "{l:?}");
        }
    }

    fn ulp(x: f64) -> f64 {
        let x = x.abs();
        let next = f64::from_bits(x.to_bits() + 1);
        next - x
    }

    #[test]
    fn sqrt_two_round_trip() {
        let two = QuadDouble::from_f64(2.0);
        let r = two.sqrt();
        let err = ((r * r - two) / two).abs().to_f64();
        assert!(err <= 4.0 * QuadDouble::EPSILON, "err {err:e}");
    }

    #[test]
    fn third_times_three() {
        let third = QuadDouble::one() / QuadDouble::from_f64(3.0);
        let back = third * QuadDouble::from_f64(3.0);
        assert!((back - QuadDouble::one()).abs().to_f64() <= 4.0 * QuadDouble::EPSILON);
    }

    #[test]
    fn scalar_paths_match_full_ops() {
        let x = QuadDouble::one() / QuadDouble::from_f64(7.0);
        let k = 3.25;
        let a = x.mul_f64(k);
        let b = x * QuadDouble::from_f64(k);
        assert!(((a - b) / a).abs().to_f64() <= 4.0 * QuadDouble::EPSILON);
        let c = x.add_f64(k);
        let d = x + QuadDouble::from_f64(k);
        assert!(((c - d) / c).abs().to_f64() <= 4.0 * QuadDouble::EPSILON);
    }
}
