//! Stage workloads shared by `sertrack bench` and the criterion benches.
//!
//! Setup is not timed: the system is generated, anchored at a random point
//! and turned into a Newton homotopy before any measurement.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sertrack::blocksolve::{solve_pipelined, BlockToeplitzSystem};
use sertrack::evaldiff::{eval_diff_system, hessian_point, WorkCrew};
use sertrack::newton::{newton_series, NewtonError};
use sertrack::pade::pade_vector;
use sertrack::polysys::{generate_cyclic, generate_random, make_newton_homotopy, random_point};
use sertrack::series::vector_fabry;
use sertrack::stepsize::curvature_at_point;
use sertrack::{
    Complex, ComplexMatrix, DoubleDouble, NewtonConfig, Precision, QuadDouble, Real, SparseSystem, TruncatedSeries,
};

use crate::args::{BenchArgs, Stage};
use crate::commands::with_precision;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub stage: Stage,
    pub n: usize,
    pub terms: Option<usize>,
    pub maxexp: u32,
    pub cyclic: Option<usize>,
    pub degree: usize,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn from_args(a: &BenchArgs) -> Self {
        WorkloadSpec {
            stage: a.stage,
            n: a.n,
            terms: a.terms,
            maxexp: a.maxexp,
            cyclic: a.cyclic,
            degree: a.degree,
            seed: a.seed,
        }
    }
}

/// Prepared input of one stage.
pub struct Workload<R> {
    stage: Stage,
    degree: usize,
    hom: SparseSystem<R>,
    x0: Vec<Complex<R>>,
    series: Vec<TruncatedSeries<R>>,
    blocks: Option<BlockToeplitzSystem<R>>,
}

fn random_series<R: Real>(x0: &[Complex<R>], d: usize, rng: &mut ChaCha8Rng) -> Vec<TruncatedSeries<R>> {
    x0.iter()
        .map(|&c| {
            let mut coeffs = vec![c];
            let mut scale = 1.0;
            for _ in 1..=d {
                scale *= 0.5;
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                coeffs.push(Complex::from_f64(scale * theta.cos(), scale * theta.sin()));
            }
            TruncatedSeries::new(coeffs).expect("non-empty")
        })
        .collect()
}

fn sum_abs<R: Real>(v: &[Complex<R>]) -> f64 {
    v.iter().map(|c| c.abs().to_f64()).sum()
}

impl<R: Real> Workload<R> {
    pub fn prepare(spec: &WorkloadSpec) -> Result<Self, String> {
        let d = spec.degree;
        if d == 0 {
            return Err("the series degree must be at least 1".into());
        }
        let sys = match spec.cyclic {
            Some(n) => generate_cyclic::<R>(n, d),
            None => generate_random::<R>(spec.n, spec.terms.unwrap_or(spec.n), spec.maxexp, spec.seed, d),
        }
        .map_err(|e| e.to_string())?;
        let n = sys.n();
        let x0 = random_point::<R>(n, spec.seed.wrapping_add(1));
        let hom = make_newton_homotopy(&sys.anchor(&x0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(2));
        let mut series = Vec::new();
        let mut blocks = None;
        match spec.stage {
            Stage::Evaldiff => series = random_series(&x0, d, &mut rng),
            Stage::Pade => {
                series = match newton_series(&hom, &x0, &NewtonConfig::new::<R>(d), &WorkCrew::sequential()) {
                    Ok((s, _)) => s,
                    Err(_) => random_series(&x0, d, &mut rng),
                }
            }
            Stage::Blocksolve => {
                let a = (0..=d).map(|_| ComplexMatrix::random_gaussian(n, n, &mut rng)).collect();
                let b = (0..=d).map(|_| ComplexMatrix::<R>::random_gaussian(n, 1, &mut rng).data().to_vec()).collect();
                blocks = Some(BlockToeplitzSystem::new(a, b).map_err(|e| e.to_string())?);
            }
            _ => {}
        }
        Ok(Workload { stage: spec.stage, degree: d, hom, x0, series, blocks })
    }

    pub fn n(&self) -> usize {
        self.hom.n()
    }

    /// Runs the stage once and returns a checksum of its output.
    pub fn run(&self, crew: &WorkCrew) -> Result<f64, String> {
        let d = self.degree;
        let err = |e: &dyn std::fmt::Display| e.to_string();
        match self.stage {
            Stage::Evaldiff => {
                let r = eval_diff_system(&self.hom, &self.series, crew).map_err(|e| err(&e))?;
                Ok(r.values.iter().map(|s| sum_abs(s.coeffs())).sum())
            }
            Stage::Hessians => {
                let h = hessian_point(&self.hom, &self.x0, crew).map_err(|e| err(&e))?;
                Ok(h.iter().map(|r| r.value.abs().to_f64() + r.hessian.frobenius_norm().to_f64()).sum())
            }
            Stage::Blocksolve => {
                let sys = self.blocks.as_ref().expect("prepared");
                let x = solve_pipelined(sys, crew).map_err(|e| err(&e))?;
                Ok(x.iter().map(|v| sum_abs(v)).sum())
            }
            Stage::Newton => {
                let mut cfg = NewtonConfig::new::<R>(d);
                cfg.tol_coeff = f64::MIN_POSITIVE;
                let series = match newton_series(&self.hom, &self.x0, &cfg, crew) {
                    Ok((s, _)) => s,
                    Err(NewtonError::Diverged { best, .. }) => best,
                    Err(e) => return Err(e.to_string()),
                };
                Ok(series.iter().map(|s| sum_abs(s.coeffs())).sum())
            }
            Stage::Pade => Ok(pade_vector(&self.series, d / 2, d / 2, crew)
                .iter()
                .map(|r| match r {
                    Ok(a) => sum_abs(a.denominator()),
                    Err(_) => 0.0,
                })
                .sum()),
            Stage::Shift => {
                let delta = Complex::from_f64(0.1, 0.0);
                let polys = self.hom.polys();
                let shifted = crew
                    .map(polys.len(), |i| polys[i].iter().map(|m| m.coefficient().shift(delta)).collect::<Vec<_>>());
                Ok(shifted.iter().flatten().map(|s| sum_abs(s.coeffs())).sum())
            }
            Stage::C => curvature_at_point(&self.hom, &self.x0, crew).map(|c| c.to_f64()).map_err(|e| err(&e)),
            Stage::R => {
                let (s, _) =
                    newton_series(&self.hom, &self.x0, &NewtonConfig::new::<R>(d), crew).map_err(|e| err(&e))?;
                let f = vector_fabry(&s).map_err(|e| err(&e))?;
                Ok(f.estimate.radius.to_f64())
            }
        }
    }
}

/// Timing of one thread count; the fastest of the repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub threads: usize,
    pub seconds: f64,
    pub checksum: f64,
}

pub fn measure<R: Real>(
    spec: &WorkloadSpec,
    threads: &[usize],
    repeat: usize,
) -> Result<(usize, Vec<BenchRow>), String> {
    let work = Workload::<R>::prepare(spec)?;
    let mut rows = Vec::new();
    for &p in threads {
        let crew = WorkCrew::new(p).map_err(|e| e.to_string())?;
        let mut best = f64::INFINITY;
        let mut checksum = 0.0;
        for _ in 0..repeat.max(1) {
            let start = Instant::now();
            checksum = work.run(&crew)?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        rows.push(BenchRow { threads: p, seconds: best, checksum });
    }
    Ok((work.n(), rows))
}

pub fn run(a: &BenchArgs) -> Result<(), CliError> {
    let mut threads = vec![1];
    for &p in &a.threads {
        let p = crate::cap_threads(p)?;
        if !threads.contains(&p) {
            threads.push(p);
        }
    }
    let spec = WorkloadSpec::from_args(a);
    let (n, rows) = with_precision!(a.precision, measure(&spec, &threads, a.repeat)).map_err(CliError::Usage)?;
    let base = rows[0].seconds;
    println!(
        "{:<10} {:>4} {:>4} {:>4} {:>12} {:>8} {:>8} {:>14}",
        "stage", "n", "d", "p", "seconds", "S(p)", "E(p)", "checksum"
    );
    for r in &rows {
        let s = base / r.seconds;
        println!(
            "{:<10} {:>4} {:>4} {:>4} {:>12.6e} {:>8.3} {:>8.3} {:>14.8e}",
            a.stage.name(),
            n,
            a.degree,
            r.threads,
            r.seconds,
            s,
            s / r.threads as f64,
            r.checksum
        );
    }
    if let Some(path) = &a.out {
        write_csv(path, a.stage.name(), n, a.degree, &rows)
            .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn write_csv(path: &Path, stage: &str, n: usize, d: usize, rows: &[BenchRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["stage", "n", "d", "p", "seconds"])?;
    for r in rows {
        w.write_record([
            stage.to_string(),
            n.to_string(),
            d.to_string(),
            r.threads.to_string(),
            format!("{:e}", r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}
