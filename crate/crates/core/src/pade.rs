//! Padé approximants `[K/L]` of truncated series.

use thiserror::Error;

use crate::evaldiff::WorkCrew;
use crate::linalg::{lu_factor, ComplexMatrix};
use crate::series::TruncatedSeries;
use crate::xprec::{Complex, Real};

/// `p(t) / q(t)` with `deg p = K`, `deg q = L` and `q_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant<R> {
    numerator: Vec<Complex<R>>,
    denominator: Vec<Complex<R>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PadeError<R: std::fmt::Debug> {
    #[error("series of degree {got} is too short for a [{k}/{l}] approximant")]
    DegreeTooLow { k: usize, l: usize, got: usize },
    /// The denominator system is singular for the requested `L`; `reduced`
    /// is the approximant for the largest smaller `L` that works.
    #[error("degenerate Padé table at L = {requested}, reduced to L = {}", reduced.denominator.len() - 1)]
    Degenerate { requested: usize, reduced: PadeApproximant<R> },
    #[error("evaluation too close to a pole (|q| = {denominator:e})")]
    PoleProximity { denominator: f64 },
}

impl<R: Real> PadeApproximant<R> {
    pub fn new(numerator: Vec<Complex<R>>, mut denominator: Vec<Complex<R>>) -> Self {
        assert!(!numerator.is_empty(), "numerator needs at least p_0");
        if denominator.is_empty() {
            denominator.push(Complex::one());
        }
        denominator[0] = Complex::one();
        PadeApproximant { numerator, denominator }
    }

    pub fn k(&self) -> usize {
        self.numerator.len() - 1
    }

    pub fn l(&self) -> usize {
        self.denominator.len() - 1
    }

    pub fn numerator(&self) -> &[Complex<R>] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Complex<R>] {
        &self.denominator
    }

    /// Power series of `p / q` up to degree `d`, by series division.
    pub fn expand(&self, d: usize) -> TruncatedSeries<R> {
        let mut c = vec![Complex::zero(); d + 1];
        for i in 0..=d {
            let mut v = self.numerator.get(i).copied().unwrap_or_else(Complex::zero);
            for j in 1..=self.l().min(i) {
                v -= self.denominator[j] * c[i - j];
            }
            c[i] = v;
        }
        TruncatedSeries::new(c).expect("d + 1 coefficients")
    }
}

fn horner<R: Real>(c: &[Complex<R>], t: Complex<R>) -> Complex<R> {
    c.iter().rev().fold(Complex::zero(), |acc, &ci| acc * t + ci)
}

/// Tries exactly `[k/l]`; `None` when the denominator system is singular.
fn construct_exact<R: Real>(s: &TruncatedSeries<R>, k: usize, l: usize) -> Option<PadeApproximant<R>> {
    let c = |i: isize| if i < 0 { Complex::zero() } else { s.coeff(i as usize) };
    let mut q = vec![Complex::one(); 1];
    if l > 0 {
        // sum_{j=1..L} q_j c_{K+1+r-j} = -c_{K+1+r}, r = 0 .. L-1
        let rhs: Vec<Complex<R>> = (0..l).map(|r| -c((k + 1 + r) as isize)).collect();
        if rhs.iter().all(Complex::is_zero) {
            q.resize(l + 1, Complex::zero());
        } else {
            let m = ComplexMatrix::from_fn(l, l, |r, j| c(k as isize + r as isize - j as isize));
            let f = lu_factor(&m).ok()?;
            if f.is_singular_to_working_precision() {
                return None;
            }
            q.extend(f.solve_unchecked(&rhs));
        }
    }
    let p = (0..=k)
        .map(|i| {
            let mut v = c(i as isize);
            for j in 1..=l.min(i) {
                v += q[j] * c((i - j) as isize);
            }
            v
        })
        .collect();
    Some(PadeApproximant::new(p, q))
}

/// Denominator from the `L x L` Toeplitz system in the coefficients
/// `c_{K-L+1} .. c_{K+L}`, numerator from the convolution of the series with
/// the denominator, cut at degree `K`. A zero right-hand side gives `q = 1`.
pub fn pade_construct<R: Real>(s: &TruncatedSeries<R>, k: usize, l: usize) -> Result<PadeApproximant<R>, PadeError<R>> {
    if s.degree() < k + l {
        return Err(PadeError::DegreeTooLow { k, l, got: s.degree() });
    }
    if let Some(a) = construct_exact(s, k, l) {
        return Ok(a);
    }
    let reduced = (0..l).rev().find_map(|lr| construct_exact(s, k, lr)).expect("L = 0 always succeeds");
    Err(PadeError::Degenerate { requested: l, reduced })
}

/// `p(delta) / q(delta)` by Horner's rule. Fails when `|q(delta)|` is below
/// `sqrt(eps) sum_j |q_j| |delta|^j`.
pub fn pade_evaluate<R: Real>(a: &PadeApproximant<R>, delta: Complex<R>) -> Result<Complex<R>, PadeError<R>> {
    let num = horner(&a.numerator, delta);
    let den = horner(&a.denominator, delta);
    let r = delta.abs();
    let mut scale = R::zero();
    let mut power = R::one();
    for q in &a.denominator {
        scale += q.abs() * power;
        power *= r;
    }
    if den.abs() < scale * R::epsilon().sqrt() {
        return Err(PadeError::PoleProximity { denominator: den.abs().to_f64() });
    }
    Ok(num / den)
}

/// One approximant per component, each component a job of the crew.
/// Errors are reported per component.
pub fn pade_vector<R: Real>(
    x: &[TruncatedSeries<R>],
    k: usize,
    l: usize,
    crew: &WorkCrew,
) -> Vec<Result<PadeApproximant<R>, PadeError<R>>> {
    crew.map(x.len(), |i| pade_construct(&x[i], k, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xprec::{DoubleDouble, QuadDouble};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type DD = DoubleDouble;

    fn exp_series(d: usize) -> TruncatedSeries<DD> {
        let mut c = Vec::with_capacity(d + 1);
        let mut f = DD::one();
        for k in 0..=d {
            if k > 0 {
                f /= DD::from_f64(k as f64);
            }
            c.push(Complex::from_real(f));
        }
        TruncatedSeries::new(c).unwrap()
    }

    fn geometric(a: Complex<DD>, d: usize) -> TruncatedSeries<DD> {
        TruncatedSeries::new((0..=d as u32).map(|k| a.powu(k)).collect()).unwrap()
    }

    #[test]
    fn exp_one_one() {
        let a = pade_construct(&exp_series(2), 1, 1).unwrap();
        let half = Complex::from_f64(0.5, 0.0);
        assert_eq!(a.numerator(), &[Complex::one(), half]);
        assert_eq!(a.denominator(), &[Complex::one(), -half]);
        let v = pade_evaluate(&a, Complex::from_f64(0.1, 0.0)).unwrap();
        let exact = DD::one() + DD::from_f64(0.05);
        let exact = exact / (DD::one() - DD::from_f64(0.05));
        assert!((v.re - exact).abs().to_f64() < 1e-30);
        // error O(delta^3) against exp(0.1)
        let err = (v.re.to_f64() - 0.1f64.exp()).abs();
        assert!(err > 5e-5 && err < 1.5e-4, "{err:e}");
    }

    #[test]
    fn polynomial_needs_no_denominator() {
        let s = TruncatedSeries::<DD>::from_f64s(&[1.0, 2.0, 3.0, 0.0, 0.0, 0.0], 5);
        let a = pade_construct(&s, 3, 2).unwrap();
        assert_eq!(a.denominator(), &[Complex::one(), Complex::zero(), Complex::zero()]);
        assert_eq!(a.numerator(), &s.coeffs()[..4]);
        let z = Complex::from_f64(0.3, -0.2);
        assert_eq!(pade_evaluate(&a, Complex::zero()).unwrap(), Complex::one());
        assert!((pade_evaluate(&a, z).unwrap() - s.eval(z)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn geometric_pole() {
        for a in [Complex::from_f64(2.0, 0.0), Complex::from_f64(1.0, 1.0), Complex::from_f64(0.3, 0.0)] {
            let s = geometric(a, 8);
            let p = pade_construct(&s, 0, 1).unwrap();
            let pole = -p.denominator()[1].recip();
            let rel = ((pole - a.recip()).abs() / a.recip().abs()).to_f64();
            assert!(rel <= 4.0 * DD::EPSILON, "{rel:e}");
            let fabry = s.fabry_ratio().unwrap().z.unwrap();
            assert!(((pole - fabry).abs() / pole.abs()).to_f64() <= 4.0 * DD::EPSILON);
        }
        let p = pade_construct(&geometric(Complex::from_f64(2.0, 0.0), 4), 0, 1).unwrap();
        let delta = Complex::from_real(DD::parse_decimal("0.4").unwrap());
        let v = pade_evaluate(&p, delta).unwrap();
        assert!((v - Complex::from_f64(5.0, 0.0)).abs().to_f64() <= 40.0 * DD::EPSILON);
        assert!(matches!(pade_evaluate(&p, Complex::from_f64(0.5, 0.0)), Err(PadeError::PoleProximity { .. })));
    }

    #[test]
    fn degenerate_table_reduces_l() {
        // 1 + t^2: the [1/1] system c_1 q_1 = -c_2 is singular
        let s = TruncatedSeries::<DD>::from_f64s(&[1.0, 0.0, 1.0], 2);
        match pade_construct(&s, 1, 1) {
            Err(PadeError::Degenerate { requested: 1, reduced }) => {
                assert_eq!(reduced.l(), 0);
                assert_eq!(reduced.numerator(), &s.coeffs()[..2]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(pade_construct(&s, 2, 1), Err(PadeError::DegreeTooLow { .. })));
    }

    #[test]
    fn order_condition_on_random_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let c = (0..=8)
                .map(|_| Complex::<QuadDouble>::from_f64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let s = TruncatedSeries::new(c).unwrap();
            let a = pade_construct(&s, 4, 4).unwrap();
            let e = a.expand(8);
            let scale = s.max_abs().to_f64();
            for i in 0..=8 {
                assert!((e.coeff(i) - s.coeff(i)).abs().to_f64() <= 1e-50 * scale, "coefficient {i}");
            }
        }
    }

    #[test]
    fn vector_matches_scalar_and_threads() {
        let x = vec![exp_series(8), geometric(Complex::from_f64(0.5, 0.5), 8), exp_series(8)];
        let seq = pade_vector(&x, 4, 4, &WorkCrew::sequential());
        for (s, r) in x.iter().zip(&seq) {
            assert_eq!(r, &pade_construct(s, 4, 4));
        }
        assert_eq!(pade_vector(&x, 4, 4, &WorkCrew::new(4).unwrap()), seq);
    }
}
