//! Path tracking: series Newton, step size from `C` and `R`, Padé
//! prediction, shift of the homotopy and a point corrector, repeated until
//! the target parameter value.

use std::time::Instant;

use thiserror::Error;

use crate::evaldiff::{eval_jac_point, EvalError, WorkCrew};
use crate::linalg::{lu_factor, vec_norm};
use crate::newton::{newton_series, NewtonConfig, NewtonError, NewtonReport};
use crate::pade::{pade_evaluate, pade_vector, PadeApproximant, PadeError};
use crate::polysys::SparseSystem;
use crate::series::{vector_fabry, TruncatedSeries};
use crate::stepsize::{curvature_at_point, decide_step, Bounds, StepDecision, StepError, StepPolicy};
use crate::xprec::{Complex, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    pub degree: usize,
    /// Numerator and denominator degrees of the Padé approximants.
    pub pade: (usize, usize),
    pub policy: StepPolicy,
    pub newton_max_iters: usize,
    pub newton_tol: f64,
    pub corrector_tol: f64,
    pub corrector_max_iters: usize,
    /// Halvings of a step after a failed correction.
    pub retry_cap: usize,
    pub threads: usize,
    pub max_steps: usize,
    pub t_target: f64,
    /// Tracking stops at `t_target - end_gap`.
    pub end_gap: f64,
}

impl TrackerConfig {
    /// Defaults for precision `R`: `K = L = d/2`, `beta = 0.5`, corrector
    /// tolerance `eps^(3/4)`, three retries, one thread, target `t = 1`.
    pub fn new<R: Real>(degree: usize) -> Self {
        TrackerConfig {
            degree,
            pade: (degree / 2, degree / 2),
            policy: StepPolicy::new(R::LEVEL),
            newton_max_iters: 8,
            newton_tol: R::EPSILON.sqrt(),
            corrector_tol: R::EPSILON.powf(0.75),
            corrector_max_iters: 8,
            retry_cap: 3,
            threads: 1,
            max_steps: 10_000,
            t_target: 1.0,
            end_gap: 0.0,
        }
    }

    fn validate(&self) -> Result<(), String> {
        let (k, l) = self.pade;
        if k + l > self.degree {
            return Err(format!("Padé degrees {k} + {l} exceed the series degree {}", self.degree));
        }
        let positive = [self.newton_tol, self.corrector_tol, self.policy.beta, self.policy.min_step];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err("tolerances, beta and the minimal step must be positive".into());
        }
        if !(self.end_gap >= 0.0) || !(self.t_target > self.end_gap) {
            return Err("need 0 <= end_gap < t_target".into());
        }
        if self.threads == 0 || self.newton_max_iters == 0 || self.corrector_max_iters == 0 {
            return Err("thread and iteration counts must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectorReport {
    pub iterations: usize,
    /// Max-norm of the residual at the returned point.
    pub residual: f64,
    /// Norm of the last update, zero if none was needed.
    pub last_update: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrectorError {
    #[error("singular Jacobian in the corrector")]
    Singular,
    #[error("corrector diverged at iteration {iterations}")]
    Diverged { iterations: usize },
    #[error("corrector did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<R> {
    pub t_start: R,
    pub decision: StepDecision<R>,
    /// Step actually taken, `decision.delta_t / 2^retries`.
    pub delta_t: R,
    pub retries: usize,
    pub newton: NewtonReport,
    pub corrector: CorrectorReport,
    /// Corrected point at `t_start + delta_t`.
    pub point: Vec<Complex<R>>,
    /// Components whose Padé table was degenerate and used a smaller `L`.
    pub reduced_pade: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TrackerState<R> {
    /// The homotopy shifted so that the current position is `t = 0`.
    pub hom: SparseSystem<R>,
    pub t_global: R,
    pub x_point: Vec<Complex<R>>,
    pub x_series: Vec<TruncatedSeries<R>>,
    pub step_log: Vec<StepRecord<R>>,
    /// Failed corrections over the whole run, each followed by a halving.
    pub corrector_failures: usize,
    pub times: StageTimes,
}

/// Accumulated wall-clock seconds per stage of the tracking loop.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub newton: f64,
    pub curvature: f64,
    pub radius: f64,
    pub pade: f64,
    /// Prediction, shift and correction, including retries.
    pub correct: f64,
}

#[derive(Debug, Clone, Error)]
pub enum TrackError<R: std::fmt::Debug> {
    #[error("invalid tracker input: {0}")]
    Config(String),
    #[error("step failure at t = {t:e}: {source}")]
    StepFailure { t: f64, source: StepError, state: Box<TrackerState<R>> },
    #[error("corrector failed at t = {t:e} after {retries} retries: {source}")]
    CorrectorFailure { t: f64, retries: usize, source: CorrectorError, state: Box<TrackerState<R>> },
    #[error("singular Jacobian at t = {t:e} (condition {condition:e})")]
    SingularJacobian { t: f64, condition: f64, state: Box<TrackerState<R>> },
    #[error("series Newton failed at t = {t:e}: {source}")]
    Newton { t: f64, source: NewtonError<R>, state: Box<TrackerState<R>> },
    #[error("step limit of {0} reached")]
    MaxSteps(usize, Box<TrackerState<R>>),
}

impl<R: std::fmt::Debug> TrackError<R> {
    /// State at the time of the failure, with the full step log.
    pub fn state(&self) -> Option<&TrackerState<R>> {
        match self {
            TrackError::Config(_) => None,
            TrackError::StepFailure { state, .. }
            | TrackError::CorrectorFailure { state, .. }
            | TrackError::SingularJacobian { state, .. }
            | TrackError::Newton { state, .. }
            | TrackError::MaxSteps(_, state) => Some(state),
        }
    }
}

fn max_abs<R: Real>(v: &[Complex<R>]) -> R {
    v.iter().map(|c| c.abs()).fold(R::zero(), R::max)
}

/// Point Newton at `t = 0` from `x_guess` until the update norm is at most
/// `tol` (relative to `max(1, |x|)`) and the residual is at most `tol`.
/// Growth of the update norm counts as divergence.
pub fn corrector<R: Real>(
    hom: &SparseSystem<R>,
    x_guess: &[Complex<R>],
    tol: f64,
    max_iters: usize,
    crew: &WorkCrew,
) -> Result<(Vec<Complex<R>>, CorrectorReport), CorrectorError> {
    let tol_r = R::from_f64(tol);
    let mut x = x_guess.to_vec();
    let (mut values, mut jac) = eval_jac_point(hom, &x, crew)?;
    let mut residual = max_abs(&values);
    if residual.is_zero() {
        return Ok((x, CorrectorReport { iterations: 0, residual: 0.0, last_update: 0.0 }));
    }
    let mut previous: Option<R> = None;
    for iter in 1..=max_iters {
        let f = lu_factor(&jac).map_err(|_| CorrectorError::Singular)?;
        if f.is_singular_to_working_precision() {
            return Err(CorrectorError::Singular);
        }
        let rhs: Vec<Complex<R>> = values.iter().map(|&v| -v).collect();
        let dx = f.solve_unchecked(&rhs);
        let update = vec_norm(&dx);
        if !update.is_finite() {
            return Err(CorrectorError::Singular);
        }
        if previous.is_some_and(|p| update > p) {
            return Err(CorrectorError::Diverged { iterations: iter });
        }
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += *d;
        }
        (values, jac) = eval_jac_point(hom, &x, crew)?;
        residual = max_abs(&values);
        let scale = R::one().max(vec_norm(&x));
        if update <= tol_r * scale && residual <= tol_r {
            return Ok((
                x,
                CorrectorReport { iterations: iter, residual: residual.to_f64(), last_update: update.to_f64() },
            ));
        }
        previous = Some(update);
    }
    Err(CorrectorError::NoConvergence { iterations: max_iters, residual: residual.to_f64() })
}

fn predict<R: Real>(pades: &[PadeApproximant<R>], delta: Complex<R>) -> Result<Vec<Complex<R>>, PadeError<R>> {
    pades.iter().map(|a| pade_evaluate(a, delta)).collect()
}

/// Tracks the solution path of `hom` from the regular solution `x0` at
/// `t = 0` to `t_target - end_gap`.
pub fn track_path<R: Real>(
    hom: &SparseSystem<R>,
    x0: &[Complex<R>],
    cfg: &TrackerConfig,
) -> Result<(Vec<Complex<R>>, TrackerState<R>), TrackError<R>> {
    cfg.validate().map_err(TrackError::Config)?;
    if x0.len() != hom.n() {
        return Err(TrackError::Config(format!("start point has {} coordinates for {} variables", x0.len(), hom.n())));
    }
    let crew = WorkCrew::new(cfg.threads).map_err(|e| TrackError::Config(e.to_string()))?;
    let hom = hom.with_degree(cfg.degree).map_err(|e| TrackError::Config(e.to_string()))?;
    let newton_cfg = NewtonConfig { max_iters: cfg.newton_max_iters, tol_coeff: cfg.newton_tol, degree: cfg.degree };
    let t_end = R::from_f64(cfg.t_target) - R::from_f64(cfg.end_gap);
    let (k, l) = cfg.pade;

    let mut state = TrackerState {
        hom,
        t_global: R::zero(),
        x_point: x0.to_vec(),
        x_series: Vec::new(),
        step_log: Vec::new(),
        corrector_failures: 0,
        times: StageTimes::default(),
    };
    let t_of = |s: &TrackerState<R>| s.t_global.to_f64();

    while state.t_global < t_end {
        if state.step_log.len() >= cfg.max_steps {
            return Err(TrackError::MaxSteps(cfg.max_steps, Box::new(state)));
        }
        let clock = Instant::now();
        let newton_result = newton_series(&state.hom, &state.x_point, &newton_cfg, &crew);
        state.times.newton += clock.elapsed().as_secs_f64();
        let (series, newton) = match newton_result {
            Ok(r) => r,
            Err(NewtonError::SingularJacobian { condition }) => {
                return Err(TrackError::SingularJacobian { t: t_of(&state), condition, state: Box::new(state) })
            }
            Err(source) => return Err(TrackError::Newton { t: t_of(&state), source, state: Box::new(state) }),
        };
        state.x_series = series;

        let step_err = |source: StepError, state: TrackerState<R>| TrackError::StepFailure {
            t: state.t_global.to_f64(),
            source,
            state: Box::new(state),
        };
        let clock = Instant::now();
        let curvature = curvature_at_point(&state.hom, &state.x_point, &crew);
        state.times.curvature += clock.elapsed().as_secs_f64();
        let curvature = match curvature {
            Ok(c) => c,
            Err(e) => return Err(step_err(e, state)),
        };
        let clock = Instant::now();
        let fabry = vector_fabry(&state.x_series).expect("series of one common degree");
        state.times.radius += clock.elapsed().as_secs_f64();
        let bounds = Bounds { curvature, radius: fabry.estimate.radius, pole: fabry.estimate.z };
        let decision = match decide_step(bounds, state.t_global, t_end, &cfg.policy) {
            Ok(d) => d,
            Err(e) => return Err(step_err(e, state)),
        };

        let clock = Instant::now();
        let mut pades = Vec::with_capacity(state.x_series.len());
        let mut reduced_pade = Vec::new();
        for (i, r) in pade_vector(&state.x_series, k, l, &crew).into_iter().enumerate() {
            match r {
                Ok(a) => pades.push(a),
                Err(PadeError::Degenerate { reduced, .. }) => {
                    reduced_pade.push(i);
                    pades.push(reduced);
                }
                Err(e) => return Err(TrackError::Config(e.to_string())),
            }
        }

        state.times.pade += clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let mut delta_t = decision.delta_t;
        let mut retries = 0;
        let accepted = loop {
            let attempt =
                predict(&pades, Complex::from_real(delta_t)).map_err(|_| CorrectorError::Singular).and_then(|guess| {
                    let shifted = state.hom.shift(Complex::from_real(delta_t));
                    corrector(&shifted, &guess, cfg.corrector_tol, cfg.corrector_max_iters, &crew)
                        .map(|(x, report)| (shifted, x, report))
                });
            match attempt {
                Ok(ok) => break ok,
                Err(source) => {
                    state.corrector_failures += 1;
                    if retries == cfg.retry_cap {
                        return Err(TrackError::CorrectorFailure {
                            t: t_of(&state),
                            retries,
                            source,
                            state: Box::new(state),
                        });
                    }
                    retries += 1;
                    delta_t = delta_t.mul_f64(0.5);
                }
            }
        };
        state.times.correct += clock.elapsed().as_secs_f64();
        let (shifted, x, report) = accepted;
        state.step_log.push(StepRecord {
            t_start: state.t_global,
            decision,
            delta_t,
            retries,
            newton,
            corrector: report,
            point: x.clone(),
            reduced_pade,
        });
        state.t_global += delta_t;
        state.hom = shifted;
        state.x_point = x;
    }
    Ok((state.x_point.clone(), state))
}
