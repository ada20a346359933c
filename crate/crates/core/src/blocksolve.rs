//! Lower triangular block Toeplitz systems
//!
//! ```text
//! A_0 x_0                         = b_0
//! A_1 x_0 + A_0 x_1               = b_1
//! ...
//! A_d x_0 + A_{d-1} x_1 + ... + A_0 x_d = b_d
//! ```
//!
//! solved with one factorization of `A_0`, sequentially or in pipelined
//! stages where updates `b_j -= A_{j-k} x_k` for different `j` run side by
//! side.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::evaldiff::WorkCrew;
use crate::linalg::{lu_factor, svd, vec_norm, ComplexMatrix, LinalgError, LuFactors};
use crate::xprec::{Complex, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("leading block is singular: {0}")]
    Singular(LinalgError),
    #[error("malformed block system: {0}")]
    Shape(String),
}

#[derive(Debug, Clone)]
pub struct BlockToeplitzSystem<R> {
    blocks: Vec<ComplexMatrix<R>>,
    rhs: Vec<Vec<Complex<R>>>,
}

impl<R: Real> BlockToeplitzSystem<R> {
    /// `blocks[k]` is `A_k` and `rhs[k]` is `b_k`, for `k = 0 ..= d`.
    pub fn new(blocks: Vec<ComplexMatrix<R>>, rhs: Vec<Vec<Complex<R>>>) -> Result<Self, BlockError> {
        if blocks.is_empty() || blocks.len() != rhs.len() {
            return Err(BlockError::Shape(format!("{} blocks and {} right-hand sides", blocks.len(), rhs.len())));
        }
        let n = blocks[0].rows();
        if blocks.iter().any(|a| a.rows() != n || a.cols() != n) || rhs.iter().any(|b| b.len() != n) {
            return Err(BlockError::Shape(format!("all blocks must be {n}x{n} with rhs of length {n}")));
        }
        Ok(BlockToeplitzSystem { blocks, rhs })
    }

    pub fn degree(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn n(&self) -> usize {
        self.blocks[0].rows()
    }

    pub fn blocks(&self) -> &[ComplexMatrix<R>] {
        &self.blocks
    }

    pub fn rhs(&self) -> &[Vec<Complex<R>>] {
        &self.rhs
    }

    fn factor(&self) -> Result<LuFactors<R>, BlockError> {
        let f = lu_factor(&self.blocks[0]).map_err(BlockError::Singular)?;
        if f.is_singular_to_working_precision() {
            return Err(BlockError::Singular(LinalgError::SingularToWorkingPrecision { ratio: f.pivot_ratio() }));
        }
        Ok(f)
    }

    /// `r_k = sum_{j<=k} A_j x_{k-j} - b_k` for every `k`.
    pub fn residual(&self, x: &[Vec<Complex<R>>]) -> Vec<Vec<Complex<R>>> {
        (0..=self.degree())
            .map(|k| {
                let mut r: Vec<Complex<R>> = self.rhs[k].iter().map(|&b| -b).collect();
                for j in 0..=k {
                    let ax = self.blocks[j].mul_vec(&x[k - j]).expect("validated shapes");
                    for (ri, v) in r.iter_mut().zip(ax) {
                        *ri += v;
                    }
                }
                r
            })
            .collect()
    }
}

/// `b -= A x`, one row at a time with a fixed summation order.
fn update<R: Real>(b: &mut [Complex<R>], a: &ComplexMatrix<R>, x: &[Complex<R>]) {
    for (i, bi) in b.iter_mut().enumerate() {
        let row = a.row(i);
        let mut acc = row[0] * x[0];
        for l in 1..x.len() {
            acc += row[l] * x[l];
        }
        *bi -= acc;
    }
}

/// For `k = 0 ..= d`: solve for `x_k`, then subtract `A_{j-k} x_k` from
/// every later `b_j`.
pub fn solve_sequential<R: Real>(sys: &BlockToeplitzSystem<R>) -> Result<Vec<Vec<Complex<R>>>, BlockError> {
    let f = sys.factor()?;
    let d = sys.degree();
    let mut b = sys.rhs.clone();
    let mut x = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let xk = f.solve_unchecked(&b[k]);
        for j in k + 1..=d {
            update(&mut b[j], &sys.blocks[j - k], &xk);
        }
        x.push(xk);
    }
    Ok(x)
}

/// One unit of work in the pipelined solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Factor `A_0`.
    Factor,
    /// `x_k = S(F_0, b_k)`.
    Solve(usize),
    /// `b_target -= A_{target - source} x_source`.
    Update { target: usize, source: usize },
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Factor => write!(f, "F0 = F(A0)"),
            Task::Solve(k) => write!(f, "x{k} = S(F0,b{k})"),
            Task::Update { target, source } => {
                write!(f, "b{target} = b{target} - A{}*x{source}", target - source)
            }
        }
    }
}

/// Stages of unit tasks; tasks in one stage are independent and there is a
/// barrier between stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineSchedule {
    degree: usize,
    threads: usize,
    stages: Vec<Vec<Task>>,
}

impl PipelineSchedule {
    /// The order of [`solve_sequential`], one task per stage.
    pub fn sequential(d: usize) -> Self {
        let mut stages = vec![vec![Task::Factor]];
        for k in 0..=d {
            stages.push(vec![Task::Solve(k)]);
            for j in k + 1..=d {
                stages.push(vec![Task::Update { target: j, source: k }]);
            }
        }
        PipelineSchedule { degree: d, threads: 1, stages }
    }

    /// Greedy list schedule on `p` workers. Among the ready tasks the
    /// solve comes first (it is on the critical path), then updates by
    /// increasing target. Every `b_j` receives its updates in increasing
    /// source order, as in the sequential solver.
    pub fn new(d: usize, p: usize) -> Self {
        let p = p.max(1);
        if p == 1 {
            return Self::sequential(d);
        }
        let mut stages = vec![vec![Task::Factor]];
        let mut solved = vec![false; d + 1];
        // applied[j]: number of updates already subtracted from b_j
        let mut applied = vec![0usize; d + 1];
        while !solved[d] {
            let mut ready = Vec::new();
            if let Some(k) = (0..=d).find(|&k| !solved[k]) {
                if applied[k] == k {
                    ready.push(Task::Solve(k));
                }
            }
            for j in 1..=d {
                let k = applied[j];
                if k < j && solved[k] {
                    ready.push(Task::Update { target: j, source: k });
                }
            }
            ready.truncate(p);
            for t in &ready {
                match *t {
                    Task::Solve(k) => solved[k] = true,
                    Task::Update { target, .. } => applied[target] += 1,
                    Task::Factor => {}
                }
            }
            stages.push(ready);
        }
        PipelineSchedule { degree: d, threads: p, stages }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn stages(&self) -> &[Vec<Task>] {
        &self.stages
    }

    /// Number of stages, counting the factorization.
    pub fn steps(&self) -> usize {
        self.stages.len()
    }
}

impl fmt::Display for PipelineSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, stage) in self.stages.iter().enumerate() {
            let tasks: Vec<String> = stage.iter().map(Task::to_string).collect();
            writeln!(f, "{:>3}: {}", i + 1, tasks.join("  "))?;
        }
        Ok(())
    }
}

/// Runs the stages of [`PipelineSchedule::new`] for the crew's thread count.
/// The result is bitwise identical to [`solve_sequential`].
pub fn solve_pipelined<R: Real>(
    sys: &BlockToeplitzSystem<R>,
    crew: &WorkCrew,
) -> Result<Vec<Vec<Complex<R>>>, BlockError> {
    let schedule = PipelineSchedule::new(sys.degree(), crew.threads());
    solve_with_schedule(sys, &schedule, crew)
}

pub fn solve_with_schedule<R: Real>(
    sys: &BlockToeplitzSystem<R>,
    schedule: &PipelineSchedule,
    crew: &WorkCrew,
) -> Result<Vec<Vec<Complex<R>>>, BlockError> {
    if schedule.degree() != sys.degree() {
        return Err(BlockError::Shape(format!(
            "schedule for degree {} used on degree {}",
            schedule.degree(),
            sys.degree()
        )));
    }
    let f = sys.factor()?;
    let b: Vec<Mutex<Vec<Complex<R>>>> = sys.rhs.iter().cloned().map(Mutex::new).collect();
    let x: Vec<OnceLock<Vec<Complex<R>>>> = (0..=sys.degree()).map(|_| OnceLock::new()).collect();
    for stage in &schedule.stages {
        crew.for_each(stage.len(), |t| match stage[t] {
            Task::Factor => {}
            Task::Solve(k) => {
                let bk = b[k].lock().expect("no panics while locked");
                x[k].set(f.solve_unchecked(&bk)).expect("each x_k is solved once");
            }
            Task::Update { target, source } => {
                let xk = x[source].get().expect("solve precedes its updates");
                let mut bj = b[target].lock().expect("no panics while locked");
                update(&mut bj, &sys.blocks[target - source], xk);
            }
        });
    }
    Ok(x.into_iter().map(|v| v.into_inner().expect("every x_k is solved")).collect())
}

/// Fewest threads for which the pipelined schedule reaches its minimum of
/// `2(d + 1)` stages.
pub fn speedup_threshold(d: usize) -> usize {
    if d % 2 == 1 {
        d.div_ceil(2) + 1
    } else {
        (d / 2).max(1)
    }
}

/// Sequential over pipelined step count. From the threshold on this is
/// `(d(d-1)/2 + 2(d+1)) / (2(d+1))`; below it the ratio comes from the
/// schedule.
pub fn model_speedup(d: usize, p: usize) -> Ratio<u64> {
    let d64 = d as u64;
    let sequential = d64 * (d64.saturating_sub(1)) / 2 + 2 * (d64 + 1);
    if p >= speedup_threshold(d) {
        Ratio::new(sequential, 2 * (d64 + 1))
    } else {
        Ratio::new(sequential, PipelineSchedule::new(d, p).steps() as u64)
    }
}

/// Scaling of the blocks in [`error_growth_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeRegime {
    /// `|A_i| ~ rho^i`.
    Geometric,
    /// `|A_i| ~ 1`.
    Flat,
}

/// Builds a block system with a known solution and a leading block of
/// condition `kappa`, solves it sequentially and returns the relative error
/// of every `x_i`.
///
/// `A_0 = U diag(s) V^*` with random unitary `U`, `V`, one singular value
/// equal to `1` and the others equal to `1/kappa`, so that `A_0^{-1}`
/// amplifies every direction but one by `kappa`. The other blocks
/// are Gaussian, scaled in the spectral norm per `regime`; the solution
/// blocks are Gaussian with `|x_i| = rho^i`.
pub fn error_growth_probe<R: Real>(
    n: usize,
    d: usize,
    kappa: f64,
    rho: f64,
    regime: ProbeRegime,
    seed: u64,
) -> Result<Vec<f64>, BlockError> {
    if n == 0 || kappa < 1.0 || rho <= 0.0 {
        return Err(BlockError::Shape("need n >= 1, kappa >= 1 and rho > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = ComplexMatrix::<R>::random_unitary(n, &mut rng);
    let v = ComplexMatrix::<R>::random_unitary(n, &mut rng);
    let small = R::one() / R::from_f64(kappa);
    let spectrum: Vec<Complex<R>> = (0..n).map(|i| Complex::from_real(if i == 0 { R::one() } else { small })).collect();
    let a0 = u
        .matmul(&ComplexMatrix::diagonal(&spectrum))
        .and_then(|m| m.matmul(&v.conj_transpose()))
        .expect("square factors");
    let mut blocks = vec![a0];
    for i in 1..=d {
        let g = ComplexMatrix::<R>::random_gaussian(n, n, &mut rng);
        let target = match regime {
            ProbeRegime::Geometric => R::from_f64(rho).powi(i as i32),
            ProbeRegime::Flat => R::one(),
        };
        let scale = target / svd(&g, false).map_err(BlockError::Singular)?.largest();
        blocks.push(g.scale(Complex::from_real(scale)));
    }
    let truth: Vec<Vec<Complex<R>>> = (0..=d)
        .map(|i| {
            let g = ComplexMatrix::<R>::random_gaussian(n, 1, &mut rng);
            let scale = R::from_f64(rho).powi(i as i32) / g.frobenius_norm();
            g.data().iter().map(|z| z.scale(scale)).collect()
        })
        .collect();
    let rhs: Vec<Vec<Complex<R>>> = (0..=d)
        .map(|k| {
            let mut b = vec![Complex::zero(); n];
            for j in 0..=k {
                let ax = blocks[j].mul_vec(&truth[k - j]).expect("square");
                for (bi, v) in b.iter_mut().zip(ax) {
                    *bi += v;
                }
            }
            b
        })
        .collect();
    let sys = BlockToeplitzSystem::new(blocks, rhs)?;
    let x = solve_sequential(&sys)?;
    Ok(x.iter()
        .zip(&truth)
        .map(|(xi, ti)| {
            let diff: Vec<Complex<R>> = xi.iter().zip(ti).map(|(&a, &b)| a - b).collect();
            (vec_norm(&diff) / vec_norm(ti)).to_f64()
        })
        .collect())
}
