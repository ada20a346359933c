//! Newton's method on power series.
//!
//! Each iteration evaluates the homotopy and its Jacobian at the current
//! series, solves the lower triangular block Toeplitz system
//! `J(t) dx(t) = -H(x(t), t)` and adds the update.

use thiserror::Error;

use crate::blocksolve::{solve_pipelined, BlockError, BlockToeplitzSystem};
use crate::evaldiff::{eval_diff_system, EvalError, WorkCrew};
use crate::linalg::condition;
use crate::polysys::SparseSystem;
use crate::series::TruncatedSeries;
use crate::xprec::{Complex, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub max_iters: usize,
    /// Threshold on the max-norm of the highest-order update coefficient.
    pub tol_coeff: f64,
    pub degree: usize,
}

impl NewtonConfig {
    /// Eight iterations and a tolerance of `sqrt(eps)` for the precision `R`.
    pub fn new<R: Real>(degree: usize) -> Self {
        NewtonConfig { max_iters: 8, tol_coeff: R::EPSILON.sqrt(), degree }
    }

    /// Iterations needed before the coefficient test is trusted: starting
    /// from a point, the number of correct coefficients at most doubles per
    /// iteration, so the top coefficient is untouched before this many.
    pub fn min_iters(&self) -> usize {
        (usize::BITS - self.degree.leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Max-norm over all coefficients of each update.
    pub update_norms: Vec<f64>,
    /// Max-norm of the highest-order coefficient of each update.
    pub last_coeff_norms: Vec<f64>,
    /// Max-norm over all coefficients of `H(x(t), t)` at the returned series.
    pub residual_norm: f64,
    /// Condition number of the Jacobian at `t = 0` and the start point.
    pub condition: f64,
    pub stop: StopReason,
}

#[derive(Debug, Clone, Error)]
pub enum NewtonError<R: std::fmt::Debug> {
    #[error("Jacobian at t = 0 is singular to working precision (condition {condition:e})")]
    SingularJacobian { condition: f64 },
    #[error("Newton diverged after {} iterations", report.iterations)]
    Diverged { best: Vec<TruncatedSeries<R>>, report: NewtonReport },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid Newton input: {0}")]
    Input(String),
}

fn max_norm<R: Real>(v: &[TruncatedSeries<R>]) -> R {
    v.iter().map(TruncatedSeries::max_abs).fold(R::zero(), R::max)
}

/// Computes the series `x(t)` with `H(x(t), t) = O(t^{d+1})` starting at
/// the point `x0`.
///
/// Stops when the highest-order update coefficient has max-norm below
/// `tol_coeff` after at least [`NewtonConfig::min_iters`] iterations, when
/// an update is zero, or after `max_iters`. Divergence means that the
/// constant-term update grew in two consecutive iterations while above the
/// tolerance; the error carries the iterate with the smallest update.
pub fn newton_series<R: Real>(
    hom: &SparseSystem<R>,
    x0: &[Complex<R>],
    cfg: &NewtonConfig,
    crew: &WorkCrew,
) -> Result<(Vec<TruncatedSeries<R>>, NewtonReport), NewtonError<R>> {
    if cfg.max_iters == 0 || !(cfg.tol_coeff > 0.0) {
        return Err(NewtonError::Input("need max_iters >= 1 and tol_coeff > 0".into()));
    }
    if x0.len() != hom.n() || hom.num_polys() != hom.n() {
        return Err(NewtonError::Input(format!(
            "{} polynomials in {} variables with a start point of length {}",
            hom.num_polys(),
            hom.n(),
            x0.len()
        )));
    }
    let d = cfg.degree;
    let hom = hom.with_degree(d).map_err(|e| NewtonError::Input(e.to_string()))?;
    let tol = R::from_f64(cfg.tol_coeff);
    let mut x: Vec<TruncatedSeries<R>> = x0.iter().map(|&c| TruncatedSeries::constant(c, d)).collect();
    let mut report = NewtonReport {
        iterations: 0,
        update_norms: Vec::new(),
        last_coeff_norms: Vec::new(),
        residual_norm: 0.0,
        condition: 0.0,
        stop: StopReason::MaxIters,
    };
    let mut best = (x.clone(), R::infinity());
    let mut constant_norms: Vec<R> = Vec::new();

    for iter in 0..cfg.max_iters {
        let ev = eval_diff_system(&hom, &x, crew)?;
        let a0 = ev.jacobian_coefficient(0);
        if iter == 0 {
            let kappa = condition(&a0).map(Real::to_f64).unwrap_or(f64::INFINITY);
            report.condition = kappa;
            if !(kappa * R::EPSILON.sqrt() < 1.0) {
                return Err(NewtonError::SingularJacobian { condition: kappa });
            }
        }
        let blocks = (0..=d).map(|k| ev.jacobian_coefficient(k)).collect();
        let rhs = (0..=d).map(|k| ev.values.iter().map(|h| -h.coeff(k)).collect()).collect();
        let sys = BlockToeplitzSystem::new(blocks, rhs).map_err(|e| NewtonError::Input(e.to_string()))?;
        let dx = match solve_pipelined(&sys, crew) {
            Ok(dx) => dx,
            Err(BlockError::Singular(_)) => return Err(NewtonError::SingularJacobian { condition: report.condition }),
            Err(e) => return Err(NewtonError::Input(e.to_string())),
        };

        let mut full = R::zero();
        let mut constant = R::zero();
        let mut top = R::zero();
        for (k, block) in dx.iter().enumerate() {
            let norm = block.iter().map(|c| c.abs()).fold(R::zero(), R::max);
            full = full.max(norm);
            if k == 0 {
                constant = norm;
            }
            if k == d {
                top = norm;
            }
        }
        for (i, xi) in x.iter_mut().enumerate() {
            for (k, c) in xi.coeffs_mut().iter_mut().enumerate() {
                *c += dx[k][i];
            }
        }
        report.iterations = iter + 1;
        report.update_norms.push(full.to_f64());
        report.last_coeff_norms.push(top.to_f64());
        if full < best.1 {
            best = (x.clone(), full);
        }

        constant_norms.push(constant);
        if let [a, b, c] = constant_norms[constant_norms.len().saturating_sub(3)..] {
            if b > a && c > b && c > tol {
                report.residual_norm = f64::NAN;
                return Err(NewtonError::Diverged { best: best.0, report });
            }
        }
        if full.is_zero() || (top < tol && report.iterations >= cfg.min_iters()) {
            report.stop = StopReason::Tolerance;
            break;
        }
    }
    let ev = eval_diff_system(&hom, &x, crew)?;
    report.residual_norm = max_norm(&ev.values).to_f64();
    Ok((x, report))
}
