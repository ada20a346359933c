//! Sparse polynomial systems and homotopies.
//!
//! A monomial `c(t) * x_0^{e_0} * ... * x_{n-1}^{e_{n-1}}` is stored with its
//! full exponent vector and its support (the variables with `e_i >= 1`).
//! Evaluation splits it as `(prod_{i in support} x_i) * prod_i x_i^{e_i - 1}`;
//! the second factor is shared by all partial derivatives and comes out of a
//! [`PowerTable`].

mod format;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ring::Ring;
use crate::series::TruncatedSeries;
use crate::xprec::{Complex, Real};

pub use format::{parse_system, serialize_system};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolysysError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("variable x{index} out of range for n = {n}")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// One term `c(t) * prod x_i^{e_i}` of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<R> {
    coefficient: TruncatedSeries<R>,
    exponents: Vec<u32>,
    support: Vec<usize>,
}

/// How the evaluation kernels treat a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialShape {
    /// No variables.
    Constant,
    /// A single variable to the first power.
    Linear(usize),
    /// Anything else; goes through the product scheme.
    General,
}

impl<R: Real> Monomial<R> {
    pub fn new(coefficient: TruncatedSeries<R>, exponents: Vec<u32>) -> Self {
        let support = exponents.iter().enumerate().filter(|(_, &e)| e >= 1).map(|(i, _)| i).collect();
        Monomial { coefficient, exponents, support }
    }

    pub fn constant(coefficient: TruncatedSeries<R>, n: usize) -> Self {
        Monomial::new(coefficient, vec![0; n])
    }

    pub fn coefficient(&self) -> &TruncatedSeries<R> {
        &self.coefficient
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Sorted indices of the variables that occur.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn shape(&self) -> MonomialShape {
        match self.support.as_slice() {
            [] => MonomialShape::Constant,
            [i] if self.exponents[*i] == 1 => MonomialShape::Linear(*i),
            _ => MonomialShape::General,
        }
    }

    /// `(i, e_i - 1)` for each variable whose exponent is at least two: the
    /// factors of the common factor.
    pub fn common_factor(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.support.iter().filter(|&&i| self.exponents[i] >= 2).map(move |&i| (i, self.exponents[i] - 1))
    }

    /// Direct evaluation at a point with the coefficient taken at `t`, by
    /// repeated squaring. Slow; used for anchoring and as a check.
    pub fn eval_naive(&self, x: &[Complex<R>], t: Complex<R>) -> Complex<R> {
        let mut acc = self.coefficient.eval(t);
        for &i in &self.support {
            acc *= x[i].powu(self.exponents[i]);
        }
        acc
    }

    fn map_coefficient(&self, f: impl FnOnce(&TruncatedSeries<R>) -> TruncatedSeries<R>) -> Self {
        Monomial { coefficient: f(&self.coefficient), exponents: self.exponents.clone(), support: self.support.clone() }
    }
}

/// `n` variables, a list of polynomials, coefficient series of one common
/// degree.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem<R> {
    n: usize,
    degree: usize,
    polys: Vec<Vec<Monomial<R>>>,
}

impl<R: Real> SparseSystem<R> {
    pub fn new(n: usize, degree: usize, polys: Vec<Vec<Monomial<R>>>) -> Result<Self, PolysysError> {
        if n == 0 {
            return Err(PolysysError::Invalid("a system needs at least one variable".into()));
        }
        if polys.is_empty() {
            return Err(PolysysError::Invalid("a system needs at least one polynomial".into()));
        }
        for (k, p) in polys.iter().enumerate() {
            if p.is_empty() {
                return Err(PolysysError::Invalid(format!("polynomial {k} has no terms")));
            }
            for m in p {
                if m.exponents.len() != n {
                    return Err(PolysysError::DimensionMismatch { expected: n, got: m.exponents.len() });
                }
                if m.coefficient.degree() != degree {
                    return Err(PolysysError::Invalid(format!(
                        "coefficient degree {} in polynomial {k} differs from system degree {degree}",
                        m.coefficient.degree()
                    )));
                }
            }
        }
        Ok(SparseSystem { n, degree, polys })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Truncation degree of the coefficient series.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn polys(&self) -> &[Vec<Monomial<R>>] {
        &self.polys
    }

    pub fn num_polys(&self) -> usize {
        self.polys.len()
    }

    pub fn num_monomials(&self) -> usize {
        self.polys.iter().map(Vec::len).sum()
    }

    /// Whether any coefficient depends on `t`.
    pub fn is_homotopy(&self) -> bool {
        self.monomials().any(|m| m.coefficient.coeffs()[1..].iter().any(|c| !c.is_zero()))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial<R>> {
        self.polys.iter().flatten()
    }

    pub fn max_exponent(&self) -> u32 {
        self.monomials().flat_map(|m| m.exponents.iter().copied()).max().unwrap_or(0)
    }

    /// Same system with coefficient series padded or cut to degree `d`.
    /// Cutting nonzero coefficients is an error.
    pub fn with_degree(&self, d: usize) -> Result<Self, PolysysError> {
        for m in self.monomials() {
            if m.coefficient.coeffs().iter().skip(d + 1).any(|c| !c.is_zero()) {
                return Err(PolysysError::Invalid(format!("coefficients have nonzero terms beyond degree {d}")));
            }
        }
        Ok(self.map_coefficients(d, |c| {
            let mut v = c.coeffs().to_vec();
            v.resize(d + 1, Complex::zero());
            TruncatedSeries::new(v).expect("degree + 1 >= 1 coefficients")
        }))
    }

    /// Homotopy in the shifted parameter: coefficients `c(t)` become
    /// `c(t + delta)`.
    pub fn shift(&self, delta: Complex<R>) -> Self {
        self.map_coefficients(self.degree, |c| c.shift(delta))
    }

    /// Residuals at a point with coefficients taken at `t`, by direct
    /// evaluation.
    pub fn eval_naive(&self, x: &[Complex<R>], t: Complex<R>) -> Result<Vec<Complex<R>>, PolysysError> {
        self.check_point(x)?;
        Ok(self.polys.iter().map(|p| p.iter().fold(Complex::zero(), |acc, m| acc + m.eval_naive(x, t))).collect())
    }

    pub(crate) fn check_point<T>(&self, x: &[T]) -> Result<(), PolysysError> {
        if x.len() != self.n {
            Err(PolysysError::DimensionMismatch { expected: self.n, got: x.len() })
        } else {
            Ok(())
        }
    }

    /// Subtracts each residual at `point` from the constant term (adding a
    /// constant monomial where there is none), so that `point` becomes an
    /// exact root up to rounding.
    pub fn anchor(&self, point: &[Complex<R>]) -> Result<Self, PolysysError> {
        let residuals = self.eval_naive(point, Complex::zero())?;
        let mut polys = self.polys.clone();
        for (p, r) in polys.iter_mut().zip(residuals) {
            match p.iter_mut().find(|m| m.support.is_empty()) {
                Some(m) => m.coefficient.coeffs_mut()[0] -= r,
                None => p.push(Monomial::constant(TruncatedSeries::constant(-r, self.degree), self.n)),
            }
        }
        SparseSystem::new(self.n, self.degree, polys)
    }

    /// Rounds (or extends exactly) every coefficient to another precision.
    pub fn convert<S: Real>(&self) -> SparseSystem<S> {
        let polys = self
            .polys
            .iter()
            .map(|p| {
                p.iter()
                    .map(|m| Monomial {
                        coefficient: TruncatedSeries::new(m.coefficient.coeffs().iter().map(|c| c.convert()).collect())
                            .expect("nonempty"),
                        exponents: m.exponents.clone(),
                        support: m.support.clone(),
                    })
                    .collect()
            })
            .collect();
        SparseSystem { n: self.n, degree: self.degree, polys }
    }

    fn map_coefficients(&self, degree: usize, f: impl Fn(&TruncatedSeries<R>) -> TruncatedSeries<R>) -> Self {
        let polys = self.polys.iter().map(|p| p.iter().map(|m| m.map_coefficient(&f)).collect()).collect();
        SparseSystem { n: self.n, degree, polys }
    }
}

/// The cyclic `n`-roots system: for `i = 1 .. n-1` the sum over `j` of the
/// products of `i` cyclically consecutive variables starting at `x_j`, and
/// finally `x_0 x_1 ... x_{n-1} - 1`.
pub fn generate_cyclic<R: Real>(n: usize, degree: usize) -> Result<SparseSystem<R>, PolysysError> {
    if n < 2 {
        return Err(PolysysError::Invalid(format!("cyclic roots need n >= 2, got {n}")));
    }
    let one = TruncatedSeries::one(degree);
    let mut polys = Vec::with_capacity(n);
    for i in 1..n {
        let poly = (0..n)
            .map(|j| {
                let mut e = vec![0u32; n];
                for k in j..j + i {
                    e[k % n] += 1;
                }
                Monomial::new(one.clone(), e)
            })
            .collect();
        polys.push(poly);
    }
    polys.push(vec![Monomial::new(one.clone(), vec![1; n]), Monomial::constant(one.neg(), n)]);
    SparseSystem::new(n, degree, polys)
}

/// `n` polynomials of `terms` monomials each, exponents uniform in
/// `0..=max_exponent`, coefficients uniform on the complex unit circle.
///
/// The generator is ChaCha8 seeded with `seed`, so the system is a pure
/// function of the arguments.
pub fn generate_random<R: Real>(
    n: usize,
    terms: usize,
    max_exponent: u32,
    seed: u64,
    degree: usize,
) -> Result<SparseSystem<R>, PolysysError> {
    if terms == 0 || max_exponent == 0 {
        return Err(PolysysError::Invalid("terms and max_exponent must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys = (0..n)
        .map(|_| {
            (0..terms)
                .map(|_| {
                    let e = (0..n).map(|_| rng.random_range(0..=max_exponent)).collect();
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    Monomial::new(TruncatedSeries::constant(Complex::from_angle(theta), degree), e)
                })
                .collect()
        })
        .collect();
    SparseSystem::new(n, degree, polys)
}

/// Point with coordinates uniform on the complex unit circle.
pub fn random_point<R: Real>(n: usize, seed: u64) -> Vec<Complex<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Complex::from_angle(rng.random_range(0.0..std::f64::consts::TAU))).collect()
}

/// Adds the parameter to every polynomial: `f_i` becomes `f_i + t`, as one
/// extra constant monomial with coefficient series `(0, 1, 0, ..., 0)`.
pub fn make_newton_homotopy<R: Real>(sys: &SparseSystem<R>) -> Result<SparseSystem<R>, PolysysError> {
    if sys.is_homotopy() {
        return Err(PolysysError::Invalid("system already depends on t".into()));
    }
    if sys.degree() < 1 {
        return Err(PolysysError::Invalid("a homotopy needs coefficient degree at least 1".into()));
    }
    let t = TruncatedSeries::linear(Complex::zero(), Complex::one(), sys.degree());
    let mut polys = sys.polys.clone();
    for p in &mut polys {
        p.push(Monomial::constant(t.clone(), sys.n()));
    }
    SparseSystem::new(sys.n(), sys.degree(), polys)
}

/// Powers `x_i^e` for `e = 2 ..= max_i`, one row per variable.
#[derive(Debug, Clone)]
pub struct PowerTable<T> {
    rows: Vec<Vec<T>>,
}

impl<T> PowerTable<T> {
    /// Largest power of each variable needed by the common factors of `sys`.
    pub fn common_factor_exponents<R: Real>(sys: &SparseSystem<R>) -> Vec<u32> {
        let mut need = vec![0u32; sys.n()];
        for m in sys.monomials() {
            for (i, e) in m.common_factor() {
                need[i] = need[i].max(e);
            }
        }
        need
    }

    /// Like [`PowerTable::common_factor_exponents`], but also covering the
    /// squares used on Hessian diagonals.
    pub fn hessian_exponents<R: Real>(sys: &SparseSystem<R>) -> Vec<u32> {
        let mut need = Self::common_factor_exponents(sys);
        for m in sys.monomials() {
            for (i, _) in m.common_factor() {
                need[i] = need[i].max(2);
            }
        }
        need
    }

    pub fn build(x: &[T], max_exponent: &[u32], count: &mut u64) -> Self
    where
        T: Ring,
    {
        let rows = x
            .iter()
            .zip(max_exponent)
            .map(|(xi, &top)| {
                let mut row: Vec<T> = Vec::with_capacity(top.saturating_sub(1) as usize);
                for _ in 2..=top {
                    let prev = row.last().unwrap_or(xi);
                    let next = prev.mul_counted(xi, count);
                    row.push(next);
                }
                row
            })
            .collect();
        PowerTable { rows }
    }

    /// `x_i^e` for `e >= 2`. Panics if the table does not cover it.
    #[inline]
    pub fn get(&self, i: usize, e: u32) -> &T {
        &self.rows[i][(e - 2) as usize]
    }

    /// `x_i^e` for `e >= 1`, reading `x_i` itself from `x`.
    #[inline]
    pub fn power<'a>(&'a self, x: &'a [T], i: usize, e: u32) -> &'a T {
        if e == 1 {
            &x[i]
        } else {
            self.get(i, e)
        }
    }

    pub fn max_stored(&self, i: usize) -> u32 {
        self.rows[i].len() as u32 + 1
    }
}
