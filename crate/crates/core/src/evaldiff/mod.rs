//! Evaluation and differentiation of sparse systems, on truncated series
//! (value and Jacobian) and at complex points (value, gradient, Hessian).
//!
//! Products of `m` variables are differentiated with forward, backward and
//! cross products, `3m - 5` multiplications in all. A monomial's common
//! factor `prod x_i^{e_i - 1}` is read from a [`PowerTable`] and applied once.

mod crew;
mod hessian;

use thiserror::Error;

use crate::linalg::ComplexMatrix;
use crate::polysys::{Monomial, MonomialShape, PolysysError, PowerTable, SparseSystem};
use crate::ring::Ring;
use crate::series::TruncatedSeries;
use crate::xprec::{Complex, Real};

pub use crew::{job_owners, WorkCrew};
pub use hessian::{hessian_point, HessResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("product of an empty list of variables")]
    EmptyProduct,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input series degree does not match the system degree {0}")]
    DegreeMismatch(usize),
    #[error("work crew: {0}")]
    Crew(String),
}

impl From<PolysysError> for EvalError {
    fn from(e: PolysysError) -> Self {
        match e {
            PolysysError::DimensionMismatch { expected, got } => EvalError::DimensionMismatch { expected, got },
            other => EvalError::Crew(other.to_string()),
        }
    }
}

/// Multiplication counts by purpose.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    /// Inside the forward/backward/cross product scheme.
    pub product: u64,
    /// Assembling common factors from the power table.
    pub common_factor: u64,
    /// Building the power table.
    pub power_table: u64,
    /// Coefficients, weights and Hessian assembly.
    pub other: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.product + self.common_factor + self.power_table + self.other
    }

    pub fn add(&mut self, o: &OpCounts) {
        self.product += o.product;
        self.common_factor += o.common_factor;
        self.power_table += o.power_table;
        self.other += o.other;
    }
}

/// Forward products `x_0 ... x_k`, backward products `x_k ... x_{m-1}` and
/// the gradient of the full product.
pub(crate) struct Products<T> {
    pub forward: Vec<T>,
    pub backward: Vec<T>,
    pub gradient: Vec<T>,
}

impl<T: Ring> Products<T> {
    pub fn value(&self) -> &T {
        self.forward.last().expect("at least one variable")
    }

    /// `x_0 ... x_{k-1}`, `None` for the empty product.
    pub fn prefix(&self, k: usize) -> Option<&T> {
        k.checked_sub(1).map(|i| &self.forward[i])
    }

    /// `x_k ... x_{m-1}`, `None` for the empty product.
    pub fn suffix(&self, k: usize) -> Option<&T> {
        self.backward.get(k)
    }
}

/// For `m >= 3`: `m - 1` forward, `m - 2` backward and `m - 2` cross
/// products. The backward list is only filled down to index 1 and the
/// forward list up to the full product.
pub(crate) fn products<T: Ring>(vars: &[&T], count: &mut u64) -> Products<T> {
    let m = vars.len();
    debug_assert!(m >= 1);
    let mut forward = Vec::with_capacity(m);
    forward.push(vars[0].clone());
    for k in 1..m {
        let next = forward[k - 1].mul_counted(vars[k], count);
        forward.push(next);
    }
    if m == 1 {
        return Products { forward, backward: vec![vars[0].clone()], gradient: vec![vars[0].one_like()] };
    }
    // backward[k] = x_k ... x_{m-1} for k >= 1; slot 0 is never needed
    let mut backward: Vec<T> = vec![vars[m - 1].clone(); m];
    for k in (1..m - 1).rev() {
        backward[k] = vars[k].mul_counted(&backward[k + 1], count);
    }
    let mut gradient = Vec::with_capacity(m);
    gradient.push(backward[1].clone());
    for k in 1..m - 1 {
        gradient.push(forward[k - 1].mul_counted(&backward[k + 1], count));
    }
    gradient.push(forward[m - 2].clone());
    backward[0] = forward[m - 1].clone();
    Products { forward, backward, gradient }
}

/// Value and gradient of `x_1 x_2 ... x_m`. The multiplication count is
/// `3m - 5` for `m >= 3`, one for `m = 2` and zero for `m = 1`.
pub fn eval_diff_product<T: Ring>(vars: &[T], count: &mut u64) -> Result<(T, Vec<T>), EvalError> {
    if vars.is_empty() {
        return Err(EvalError::EmptyProduct);
    }
    let refs: Vec<&T> = vars.iter().collect();
    let p = products(&refs, count);
    let value = p.value().clone();
    Ok((value, p.gradient))
}

/// Value and partial derivatives of one monomial.
#[derive(Debug, Clone)]
pub struct MonomialDerivatives<T> {
    pub value: T,
    /// `(i, d/dx_i)` for each variable in the support, in index order.
    pub gradient: Vec<(usize, T)>,
}

/// Common factor `prod_{e_i >= 2} x_i^{e_i - 1}`, at most `n - 1`
/// multiplications.
fn common_factor<T: Ring>(mono: &Monomial<T::Scalar>, x: &[T], table: &PowerTable<T>, count: &mut u64) -> Option<T> {
    let mut acc: Option<T> = None;
    for (i, e) in mono.common_factor() {
        let p = table.power(x, i, e);
        acc = Some(match acc {
            None => p.clone(),
            Some(a) => a.mul_counted(p, count),
        });
    }
    acc
}

/// Calls `emit(i, d/dx_i)` for every variable in the support and returns the
/// value.
fn monomial_kernel<T: Ring>(
    mono: &Monomial<T::Scalar>,
    x: &[T],
    table: &PowerTable<T>,
    counts: &mut OpCounts,
    mut emit: impl FnMut(usize, T),
) -> T {
    let c = mono.coefficient();
    match mono.shape() {
        MonomialShape::Constant => T::from_coefficient(c),
        MonomialShape::Linear(i) => {
            let ci = T::from_coefficient(c);
            counts.other += 1;
            let value = x[i].mul_coefficient(c);
            emit(i, ci);
            value
        }
        MonomialShape::General => {
            let support = mono.support();
            let e = mono.exponents();
            let cf = match common_factor(mono, x, table, &mut counts.common_factor) {
                Some(f) => {
                    counts.other += 1;
                    f.mul_coefficient(c)
                }
                None => T::from_coefficient(c),
            };
            let weight = |g: T, k: u32| if k > 1 { g.mul_int(k as u64) } else { g };
            if let [i] = support {
                emit(*i, weight(cf.clone(), e[*i]));
                counts.other += 1;
                return cf.mul(&x[*i]);
            }
            let vars: Vec<&T> = support.iter().map(|&i| &x[i]).collect();
            let p = products(&vars, &mut counts.product);
            for (k, g) in p.gradient.iter().enumerate() {
                let i = support[k];
                emit(i, weight(cf.mul_counted(g, &mut counts.other), e[i]));
            }
            cf.mul_counted(p.value(), &mut counts.other)
        }
    }
}

/// Value and gradient of `c x^e`; `x` must have one entry per variable and
/// `table` must cover the monomial's common factor.
pub fn eval_diff_monomial<T: Ring>(
    mono: &Monomial<T::Scalar>,
    x: &[T],
    table: &PowerTable<T>,
    counts: &mut OpCounts,
) -> Result<MonomialDerivatives<T>, EvalError> {
    if x.len() != mono.exponents().len() {
        return Err(EvalError::DimensionMismatch { expected: mono.exponents().len(), got: x.len() });
    }
    let mut gradient = Vec::with_capacity(mono.support().len());
    let value = monomial_kernel(mono, x, table, counts, |i, g| gradient.push((i, g)));
    Ok(MonomialDerivatives { value, gradient })
}

/// Residuals and Jacobian rows of a system.
#[derive(Debug, Clone)]
pub struct EvalJacResult<T> {
    pub values: Vec<T>,
    /// `jacobian[i][j] = d f_i / d x_j`.
    pub jacobian: Vec<Vec<T>>,
    pub counts: OpCounts,
}

impl<R: Real> EvalJacResult<TruncatedSeries<R>> {
    /// Matrix of the `k`-th coefficients of the Jacobian series.
    pub fn jacobian_coefficient(&self, k: usize) -> ComplexMatrix<R> {
        let rows = self.jacobian.len();
        let cols = self.jacobian.first().map_or(0, Vec::len);
        ComplexMatrix::from_fn(rows, cols, |i, j| self.jacobian[i][j].coeff(k))
    }
}

impl<R: Real> EvalJacResult<Complex<R>> {
    pub fn jacobian_matrix(&self) -> ComplexMatrix<R> {
        let rows = self.jacobian.len();
        let cols = self.jacobian.first().map_or(0, Vec::len);
        ComplexMatrix::from_fn(rows, cols, |i, j| self.jacobian[i][j])
    }
}

fn check_input<T: Ring>(sys: &SparseSystem<T::Scalar>, x: &[T]) -> Result<(), EvalError> {
    if x.len() != sys.n() {
        return Err(EvalError::DimensionMismatch { expected: sys.n(), got: x.len() });
    }
    if !x.iter().all(|v| v.fits_degree(sys.degree())) {
        return Err(EvalError::DegreeMismatch(sys.degree()));
    }
    Ok(())
}

/// Evaluates every polynomial and its gradient. Polynomial `i` is one job
/// of the work crew; monomials are summed in input order, so the result does
/// not depend on the number of threads.
///
/// With series input the coefficient series multiply in full; with point
/// input only their constant terms are used.
pub fn eval_diff_system<T: Ring>(
    sys: &SparseSystem<T::Scalar>,
    x: &[T],
    crew: &WorkCrew,
) -> Result<EvalJacResult<T>, EvalError> {
    check_input(sys, x)?;
    let mut counts = OpCounts::default();
    let need = PowerTable::<T>::common_factor_exponents(sys);
    let table = PowerTable::build(x, &need, &mut counts.power_table);
    let zero = x[0].zero_like();
    let (rows, scratch) = crew.map_with(sys.num_polys(), OpCounts::default, |c, i| {
        let mut value = zero.clone();
        let mut row = vec![zero.clone(); sys.n()];
        for mono in &sys.polys()[i] {
            let v = monomial_kernel(mono, x, &table, c, |k, g| row[k].add_assign(&g));
            value.add_assign(&v);
        }
        (value, row)
    });
    for c in &scratch {
        counts.add(c);
    }
    let (values, jacobian) = rows.into_iter().unzip();
    Ok(EvalJacResult { values, jacobian, counts })
}

/// Residuals and Jacobian matrix at a point, with coefficients taken at
/// `t = 0`.
pub fn eval_jac_point<R: Real>(
    sys: &SparseSystem<R>,
    x: &[Complex<R>],
    crew: &WorkCrew,
) -> Result<(Vec<Complex<R>>, ComplexMatrix<R>), EvalError> {
    let r = eval_diff_system(sys, x, crew)?;
    let j = r.jacobian_matrix();
    Ok((r.values, j))
}
