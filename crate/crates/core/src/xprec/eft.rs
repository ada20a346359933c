//! Error-free transformations on hardware doubles.
//!
//! Every function here returns a pair `(s, e)` whose exact sum equals the
//! exact result of the operation, provided no overflow occurs.

/// `a + b = s + e` exactly, with `s = fl(a + b)`. Valid for any ordering of
/// the operands.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Same as [`two_sum`] but requires `|a| >= |b|` (or `a == 0`).
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// `a - b = s + e` exactly.
#[inline]
pub fn two_diff(a: f64, b: f64) -> (f64, f64) {
    let s = a - b;
    let bb = s - a;
    let e = (a - (s - bb)) - (b + bb);
    (s, e)
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
const SPLIT_THRESH: f64 = 6.696_928_794_914_17e299; // 2^996
const SPLIT_SCALE_DOWN: f64 = 3.725_290_298_461_914e-9; // 2^-28
const SPLIT_SCALE_UP: f64 = 268_435_456.0; // 2^28

/// Veltkamp split of `a` into two 26-bit halves with `a = hi + lo`.
#[inline]
pub fn split(a: f64) -> (f64, f64) {
    if !(-SPLIT_THRESH..=SPLIT_THRESH).contains(&a) {
        let a = a * SPLIT_SCALE_DOWN;
        let t = SPLITTER * a;
        let hi = t - (t - a);
        let lo = a - hi;
        (hi * SPLIT_SCALE_UP, lo * SPLIT_SCALE_UP)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

/// Product via fused multiply-add.
#[inline]
pub fn two_prod_fma(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Product via Dekker's splitting; no FMA needed.
#[inline]
pub fn two_prod_dekker(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// `a * b = p + e` exactly, with `p = fl(a * b)`.
///
/// Uses a fused multiply-add when the target has one in hardware, and
/// Dekker's algorithm otherwise. The error term is exact unless it
/// underflows (products below roughly `2^-969`).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    #[cfg(target_feature = "fma")]
    {
        two_prod_fma(a, b)
    }
    #[cfg(not(target_feature = "fma"))]
    {
        two_prod_dekker(a, b)
    }
}

/// `a * a = p + e` exactly.
#[inline]
pub fn two_sqr(a: f64) -> (f64, f64) {
    #[cfg(target_feature = "fma")]
    {
        two_prod_fma(a, a)
    }
    #[cfg(not(target_feature = "fma"))]
    {
        let p = a * a;
        let (hi, lo) = split(a);
        let e = ((hi * hi - p) + 2.0 * hi * lo) + lo * lo;
        (p, e)
    }
}

/// Renormalizing three-term sum: on return `a` holds the leading part, `b`
/// the second and `c` the remaining error.
#[inline]
pub(crate) fn three_sum(a: &mut f64, b: &mut f64, c: &mut f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(*c, t1);
    *a = s;
    let (s, e) = two_sum(t2, t3);
    *b = s;
    *c = e;
}

/// Like [`three_sum`] but drops the last error term.
#[inline]
pub(crate) fn three_sum2(a: &mut f64, b: &mut f64, c: f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(c, t1);
    *a = s;
    *b = t2 + t3;
}
