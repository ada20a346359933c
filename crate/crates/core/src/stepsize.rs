//! Step size control: the curvature bound `C`, the radius bound `R` and the
//! resulting step.

use thiserror::Error;

use crate::evaldiff::{hessian_point, EvalError, WorkCrew};
use crate::linalg::{svd, ComplexMatrix, LinalgError, SvdResult};
use crate::polysys::SparseSystem;
use crate::xprec::{Complex, Precision, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Curvature,
    Radius,
    Target,
    Floor,
}

impl Binding {
    pub fn as_str(self) -> &'static str {
        match self {
            Binding::Curvature => "curvature",
            Binding::Radius => "radius",
            Binding::Target => "target",
            Binding::Floor => "floor",
        }
    }
}

/// What to do when `beta min(C, R)` is below the minimal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorPolicy {
    Fail,
    /// Take the minimal step anyway.
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub beta: f64,
    pub min_step: f64,
    pub floor: FloorPolicy,
}

impl StepPolicy {
    pub fn new(precision: Precision) -> Self {
        StepPolicy { beta: 0.5, min_step: default_min_step(precision), floor: FloorPolicy::Fail }
    }
}

pub fn default_min_step(precision: Precision) -> f64 {
    match precision {
        Precision::D => 1e-8,
        Precision::DD => 1e-16,
        Precision::QD => 1e-32,
    }
}

/// The two bounds and the estimated nearest singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<R> {
    pub curvature: R,
    pub radius: R,
    pub pole: Option<Complex<R>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecision<R> {
    pub curvature: R,
    pub radius: R,
    pub pole: Option<Complex<R>>,
    pub delta_t: R,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("step {step:e} is below the minimal step {min_step:e}")]
    BelowMinStep { step: f64, min_step: f64 },
    #[error("invalid step request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `C = 2 sigma_n(J) / sqrt(sum_k sigma_{k,1}^2)` with `sigma_{k,1}` the
/// largest singular value of the Hessian of polynomial `k`. `+inf` when all
/// Hessians vanish.
pub fn curvature_bound<R: Real>(jacobian: &SvdResult<R>, hessians: &[SvdResult<R>]) -> R {
    let mut sum = R::zero();
    for h in hessians {
        sum += h.largest().sqr();
    }
    if sum.is_zero() {
        return R::infinity();
    }
    jacobian.smallest().mul_f64(2.0) / sum.sqrt()
}

/// `C` at a point of a system, with coefficients taken at `t = 0`. The
/// Hessians come from [`hessian_point`]; the `n + 1` singular value
/// decompositions are jobs of the crew.
pub fn curvature_at_point<R: Real>(sys: &SparseSystem<R>, x: &[Complex<R>], crew: &WorkCrew) -> Result<R, StepError> {
    let hess = hessian_point(sys, x, crew)?;
    let n = sys.n();
    let jac = ComplexMatrix::from_fn(hess.len(), n, |i, j| hess[i].gradient[j]);
    let mut svds =
        crew.map(hess.len() + 1, |k| if k == 0 { svd(&jac, false) } else { svd(&hess[k - 1].hessian, false) });
    let hs = svds.split_off(1);
    let j = svds.pop().expect("one Jacobian")?;
    let hs = hs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(curvature_bound(&j, &hs))
}

/// `delta_t = min(beta min(C, R), t_target - t_current)`.
///
/// A step below `min_step` fails or is raised to `min_step`, depending on
/// the policy, unless the target itself is closer.
pub fn decide_step<R: Real>(
    bounds: Bounds<R>,
    t_current: R,
    t_target: R,
    policy: &StepPolicy,
) -> Result<StepDecision<R>, StepError> {
    if !(t_current < t_target) {
        return Err(StepError::Invalid("the current parameter must be below the target".into()));
    }
    if bounds.curvature.is_sign_negative() || bounds.radius.is_sign_negative() || !(policy.beta > 0.0) {
        return Err(StepError::Invalid("bounds and beta must be nonnegative".into()));
    }
    let remaining = t_target - t_current;
    let (bound, mut binding) = if bounds.radius < bounds.curvature {
        (bounds.radius, Binding::Radius)
    } else {
        (bounds.curvature, Binding::Curvature)
    };
    let mut delta_t = bound.mul_f64(policy.beta);
    if !(delta_t < remaining) {
        delta_t = remaining;
        binding = Binding::Target;
    } else if delta_t < R::from_f64(policy.min_step) {
        let min_step = R::from_f64(policy.min_step);
        match policy.floor {
            FloorPolicy::Fail => {
                return Err(StepError::BelowMinStep { step: delta_t.to_f64(), min_step: policy.min_step })
            }
            FloorPolicy::Clamp if min_step < remaining => {
                delta_t = min_step;
                binding = Binding::Floor;
            }
            FloorPolicy::Clamp => {
                delta_t = remaining;
                binding = Binding::Target;
            }
        }
    }
    Ok(StepDecision { curvature: bounds.curvature, radius: bounds.radius, pole: bounds.pole, delta_t, binding })
}
