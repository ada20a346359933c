//! Exact conversion between decimal strings and multi-limb values.
//!
//! Parsing goes through an exact rational and peels off limbs by
//! round-to-nearest, so every decimal string maps to a canonical limb
//! vector. Printing searches for the shortest decimal string that parses
//! back to the same value and falls back to the exact expansion of the
//! dyadic value, which always exists.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::XprecError;

/// Exact value of a sum of finite doubles.
pub fn limbs_to_rational(limbs: &[f64]) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for &l in limbs {
        acc += BigRational::from_float(l)?;
    }
    Some(acc)
}

/// Greedy round-to-nearest decomposition of `r` into `count` doubles.
pub fn rational_to_limbs(r: &BigRational, count: usize) -> Vec<f64> {
    let mut rest = r.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let l = nearest_f64(&rest);
        out.push(l);
        if !l.is_finite() {
            break;
        }
        rest -= BigRational::from_float(l).expect("finite limb");
    }
    out.resize(count, 0.0);
    out
}

fn bit_len(x: &BigInt) -> i64 {
    x.bits() as i64
}

/// Round-to-nearest-even conversion of an exact rational.
pub fn nearest_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();

    // choose k so that num / (den * 2^k) lies in [2^52, 2^53)
    let mut k = bit_len(&num) - bit_len(&den) - 53;
    let quot_rem = |k: i64| -> (BigInt, BigInt, BigInt) {
        let (n, d) = if k >= 0 { (num.clone(), &den << (k as usize)) } else { (&num << ((-k) as usize), den.clone()) };
        let q = &n / &d;
        let r = &n - &q * &d;
        (q, r, d)
    };
    let (mut q, mut rem, mut d) = quot_rem(k);
    let two52 = BigInt::one() << 52usize;
    let two53 = BigInt::one() << 53usize;
    while q >= two53 {
        k += 1;
        (q, rem, d) = quot_rem(k);
    }
    while q < two52 {
        k -= 1;
        (q, rem, d) = quot_rem(k);
    }
    // subnormal range
    if k < -1074 {
        k = -1074;
        (q, rem, d) = quot_rem(k);
    }
    let twice = &rem << 1usize;
    let round_up = match twice.cmp(&d) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => (&q & BigInt::one()) == BigInt::one(),
    };
    if round_up {
        q += 1;
        if q == two53 {
            q = two52.clone();
            k += 1;
        }
    }
    if k + 52 > 1023 {
        return if neg { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let m = q.to_u64().expect("mantissa fits") as f64;
    let v = ldexp(m, k as i32);
    if neg {
        -v
    } else {
        v
    }
}

fn ldexp(mut m: f64, mut e: i32) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e)
}

/// Parses `[+-]digits[.digits][e[+-]digits]` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, XprecError> {
    let err = || XprecError::Parse(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = body[pos + 1..].parse().map_err(|_| err())?;
            (&body[..pos], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    if exp.abs() > 100_000 {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10).ok_or_else(err)?;
    let e10 = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if e10 >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, e10 as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-e10) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Decimal exponent `e` with `10^e <= |r| < 10^(e+1)`; `r` nonzero.
fn decimal_exponent(r: &BigRational) -> i64 {
    let a = r.abs();
    let approx = (bit_len(a.numer()) - bit_len(a.denom())) as f64 * std::f64::consts::LOG10_2;
    let mut e = approx.floor() as i64;
    let pow = |e: i64| -> BigRational {
        let ten = BigInt::from(10);
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten, e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten, (-e) as usize))
        }
    };
    while pow(e) > a {
        e -= 1;
    }
    while pow(e + 1) <= a {
        e += 1;
    }
    e
}

/// Rounds `r` to `digits` significant decimal digits. Returns the digit
/// string (no trailing zeros) and the decimal exponent of its first digit.
fn round_to_digits(r: &BigRational, digits: usize) -> (String, i64) {
    let a = r.abs();
    let mut e = decimal_exponent(&a);
    let shift = digits as i64 - 1 - e;
    let ten = BigInt::from(10);
    let scaled = if shift >= 0 {
        a * BigRational::from_integer(num_traits::pow(ten.clone(), shift as usize))
    } else {
        a / BigRational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
    };
    let fl = scaled.floor();
    let frac = &scaled - &fl;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut n = fl.to_integer();
    if frac > half || (frac == half && (&n & BigInt::one()) == BigInt::one()) {
        n += 1;
    }
    let mut s = n.to_str_radix(10);
    if s.len() > digits {
        // rounded up to the next power of ten
        e += 1;
        s.truncate(digits);
    }
    let trimmed = s.trim_end_matches('0');
    let s = if trimmed.is_empty() { "0".to_string() } else { trimmed.to_string() };
    (s, e)
}

fn layout(neg: bool, digits: &str, e: i64) -> String {
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let len = digits.len() as i64;
    if (-5..21).contains(&e) {
        if e >= 0 {
            if len <= e + 1 {
                out.push_str(digits);
                out.extend(std::iter::repeat_n('0', (e + 1 - len) as usize));
            } else {
                out.push_str(&digits[..(e + 1) as usize]);
                out.push('.');
                out.push_str(&digits[(e + 1) as usize..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
            out.push_str(digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

fn special(limbs: &[f64]) -> Option<String> {
    let hi = limbs.first().copied().unwrap_or(0.0);
    if hi.is_nan() {
        Some("nan".into())
    } else if hi.is_infinite() {
        Some(if hi > 0.0 { "inf".into() } else { "-inf".into() })
    } else if limbs.iter().any(|l| l.is_nan()) {
        Some("nan".into())
    } else {
        None
    }
}

/// Formats a limb vector with `digits` significant digits.
pub fn format_limbs(limbs: &[f64], digits: usize) -> String {
    if let Some(s) = special(limbs) {
        return s;
    }
    let r = limbs_to_rational(limbs).expect("finite limbs");
    if r.is_zero() {
        return "0".into();
    }
    let (d, e) = round_to_digits(&r, digits.max(1));
    layout(r.is_negative(), &d, e)
}

fn exact_decimal(r: &BigRational) -> String {
    // the denominator of a dyadic rational is a power of two
    let den = r.denom();
    let s = den.bits().saturating_sub(1) as usize;
    let num = r.numer().abs() * num_traits::pow(BigInt::from(5), s);
    let digits = num.to_str_radix(10);
    let e = digits.len() as i64 - 1 - s as i64;
    let trimmed = digits.trim_end_matches('0');
    layout(r.is_negative(), trimmed, e)
}

/// Shortest decimal string whose canonical parse has exactly the value of
/// `limbs`.
pub fn format_shortest(limbs: &[f64], count: usize) -> String {
    if let Some(s) = special(limbs) {
        return s;
    }
    let r = limbs_to_rational(limbs).expect("finite limbs");
    if r.is_zero() {
        return "0".into();
    }
    let max_digits = 17 * count + 4;
    for digits in 1..=max_digits {
        let (d, e) = round_to_digits(&r, digits);
        let s = layout(r.is_negative(), &d, e);
        let back = parse_rational(&s).expect("own output parses");
        let limbs_back = rational_to_limbs(&back, count);
        if limbs_to_rational(&limbs_back).as_ref() == Some(&r) {
            return s;
        }
    }
    exact_decimal(&r)
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
