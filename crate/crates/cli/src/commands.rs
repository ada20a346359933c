use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use sertrack::evaldiff::WorkCrew;
use sertrack::newton::{newton_series, NewtonError};
use sertrack::polysys::{
    generate_cyclic, generate_random, make_newton_homotopy, parse_system, random_point, serialize_system,
};
use sertrack::stepsize::default_min_step;
use sertrack::{
    Complex, DoubleDouble, NewtonConfig, Precision, QuadDouble, Real, SparseSystem, TrackError, TrackerConfig,
};

use crate::args::{Command, GenerateKind, NewtonArgs, RunFlags, TrackArgs};
use crate::error::{read_file, write_file, CliError};
use crate::points::{format_points, parse_points};
use crate::record::{complex, decimal, finite, newton_entry, stage_seconds, step_entry, RunRecord};

/// Calls a function generic over [`Real`] with the type chosen by a
/// [`Precision`] value.
macro_rules! with_precision {
    ($p:expr, $f:ident($($arg:expr),*)) => {
        match $p {
            Precision::D => $f::<f64>($($arg),*),
            Precision::DD => $f::<DoubleDouble>($($arg),*),
            Precision::QD => $f::<QuadDouble>($($arg),*),
        }
    };
}
pub(crate) use with_precision;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(kind) => generate(kind),
        Command::Newton(a) => with_precision!(a.run.precision, newton(&a)),
        Command::Track(a) => with_precision!(a.run.precision, track(&a)),
        Command::Bench(a) => crate::bench::run(&a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn generate(kind: GenerateKind) -> Result<(), CliError> {
    match kind {
        GenerateKind::Cyclic { n, degree, out } => {
            let sys = generate_cyclic::<QuadDouble>(n, degree).map_err(usage)?;
            emit(out.as_deref(), &serialize_system(&sys))
        }
        GenerateKind::Random { n, terms, maxexp, seed, degree, anchor, precision, out } => {
            with_precision!(
                precision,
                generate_random_cmd(n, terms, maxexp, seed, degree, anchor.as_deref(), out.as_deref())
            )
        }
        GenerateKind::NewtonHomotopy { input, precision, out } => {
            with_precision!(precision, newton_homotopy_cmd(&input, out.as_deref()))
        }
    }
}

fn generate_random_cmd<R: Real>(
    n: usize,
    terms: usize,
    maxexp: u32,
    seed: u64,
    degree: usize,
    anchor: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut sys = generate_random::<R>(n, terms, maxexp, seed, degree).map_err(usage)?;
    if let Some(path) = anchor {
        let x = random_point::<R>(n, seed.wrapping_add(1));
        sys = sys.anchor(&x).map_err(usage)?;
        write_file(path, &format_points(&x))?;
    }
    emit(out, &serialize_system(&sys))
}

fn newton_homotopy_cmd<R: Real>(input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let sys = parse_system::<R>(&read_file(input)?).map_err(usage)?;
    let sys = sys.with_degree(sys.degree().max(1)).map_err(usage)?;
    let hom = make_newton_homotopy(&sys).map_err(usage)?;
    emit(out, &serialize_system(&hom))
}

fn load<R: Real>(system: &Path, point: &Path) -> Result<(SparseSystem<R>, Vec<Complex<R>>), CliError> {
    let sys = parse_system::<R>(&read_file(system)?).map_err(|e| usage(format!("{}: {e}", system.display())))?;
    let x = parse_points::<R>(&read_file(point)?).map_err(|e| usage(format!("{}: {e}", point.display())))?;
    if x.len() != sys.n() {
        return Err(usage(format!("system has {} variables but the point has {} coordinates", sys.n(), x.len())));
    }
    Ok((sys, x))
}

fn base_config(run: &RunFlags, threads: usize) -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    c.insert("precision".into(), run.precision.as_str().into());
    c.insert("degree".into(), run.degree.to_string());
    c.insert("threads".into(), threads.to_string());
    c
}

fn finish(record: &mut RunRecord, out: Option<&Path>, err: Option<&CliError>) -> Result<(), CliError> {
    if let Some(e) = err {
        record.status = "error".into();
        record.exit_code = e.exit_code();
        record.error = Some(e.to_string());
    }
    if let Some(p) = out {
        write_file(p, &record.to_json())?;
    }
    Ok(())
}

fn newton<R: Real>(a: &NewtonArgs) -> Result<(), CliError> {
    let threads = crate::cap_threads(a.run.threads)?;
    let (sys, x0) = load::<R>(&a.system, &a.point)?;
    let crew = WorkCrew::new(threads).map_err(usage)?;
    let mut cfg = NewtonConfig::new::<R>(a.run.degree);
    cfg.max_iters = a.max_iters;
    let mut config = base_config(&a.run, threads);
    config.insert("max_iters".into(), a.max_iters.to_string());
    config.insert("system".into(), a.system.display().to_string());
    config.insert("point".into(), a.point.display().to_string());
    let mut record = RunRecord::new("newton", config);

    let start = Instant::now();
    let result = newton_series(&sys, &x0, &cfg, &crew);
    record.stage_seconds.insert("newton".into(), start.elapsed().as_secs_f64());
    match result {
        Ok((series, report)) => {
            println!("iterations {}  stop {:?}  residual {:.3e}", report.iterations, report.stop, report.residual_norm);
            for (i, s) in series.iter().enumerate() {
                println!("x{i}:");
                for (k, c) in s.coeffs().iter().enumerate() {
                    println!("  t^{k}: ({}, {})", c.re.to_decimal(), c.im.to_decimal());
                }
            }
            record.final_point = series.iter().map(|s| complex(&s.coeff(0))).collect();
            record.residual = finite(report.residual_norm);
            record.newton = Some(newton_entry(&report, &series));
            finish(&mut record, a.run.out.as_deref(), None)
        }
        Err(e) => {
            let err = match &e {
                NewtonError::SingularJacobian { .. } => CliError::SingularJacobian(e.to_string()),
                NewtonError::Diverged { best, report } => {
                    record.newton = Some(newton_entry(report, best));
                    CliError::CorrectorFailure(e.to_string())
                }
                _ => usage(&e),
            };
            finish(&mut record, a.run.out.as_deref(), Some(&err))?;
            Err(err)
        }
    }
}

fn track_error<R: Real>(e: &TrackError<R>) -> CliError {
    let msg = e.to_string();
    match e {
        TrackError::Config(_) => CliError::Usage(msg),
        TrackError::StepFailure { .. } | TrackError::MaxSteps(..) => CliError::StepFailure(msg),
        TrackError::CorrectorFailure { .. } => CliError::CorrectorFailure(msg),
        TrackError::SingularJacobian { .. } => CliError::SingularJacobian(msg),
        TrackError::Newton { source, .. } => match source {
            NewtonError::SingularJacobian { .. } => CliError::SingularJacobian(msg),
            NewtonError::Diverged { .. } => CliError::CorrectorFailure(msg),
            _ => CliError::Usage(msg),
        },
    }
}

fn track<R: Real>(a: &TrackArgs) -> Result<(), CliError> {
    let threads = crate::cap_threads(a.run.threads)?;
    let (sys, x0) = load::<R>(&a.system, &a.start)?;
    let mut cfg = TrackerConfig::new::<R>(a.run.degree);
    cfg.threads = threads;
    cfg.policy.beta = a.beta;
    cfg.policy.min_step = a.minstep.unwrap_or(default_min_step(R::LEVEL));
    if let Some(p) = a.pade {
        cfg.pade = p;
    }
    cfg.t_target = a.target;
    cfg.end_gap = a.end_gap;
    cfg.max_steps = a.max_steps;

    let mut config = base_config(&a.run, threads);
    config.insert("beta".into(), cfg.policy.beta.to_string());
    config.insert("minstep".into(), cfg.policy.min_step.to_string());
    config.insert("pade".into(), format!("{},{}", cfg.pade.0, cfg.pade.1));
    config.insert("target".into(), cfg.t_target.to_string());
    config.insert("end_gap".into(), cfg.end_gap.to_string());
    config.insert("max_steps".into(), cfg.max_steps.to_string());
    config.insert("system".into(), a.system.display().to_string());
    config.insert("start".into(), a.start.display().to_string());
    let mut record = RunRecord::new("track", config);

    let result = sertrack::track_path(&sys, &x0, &cfg);
    let (state, err) = match &result {
        Ok((_, state)) => (Some(state), None),
        Err(e) => (e.state(), Some(track_error(e))),
    };
    if let Some(state) = state {
        record.stage_seconds = stage_seconds(&state.times);
        record.step_log = state.step_log.iter().map(step_entry).collect();
        record.t_final = Some(decimal(state.t_global));
        record.final_point = state.x_point.iter().map(complex).collect();
        record.residual = state
            .hom
            .eval_naive(&state.x_point, Complex::zero())
            .ok()
            .map(|v| v.iter().map(|c| c.abs().to_f64()).fold(0.0, f64::max));
        print_summary(state, record.residual);
    }
    finish(&mut record, a.run.out.as_deref(), err.as_ref())?;
    match (result, err) {
        (Ok((x, _)), _) => {
            if let Some(p) = &a.point_out {
                write_file(p, &format_points(&x))?;
            }
            Ok(())
        }
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(CliError::Failed(e.to_string())),
    }
}

fn print_summary<R: Real>(state: &sertrack::TrackerState<R>, residual: Option<f64>) {
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>10} {:>7}", "step", "t", "dt", "C", "R", "binding", "retries");
    for (i, s) in state.step_log.iter().enumerate() {
        println!(
            "{:>5} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>10} {:>7}",
            i,
            s.t_start.to_f64(),
            s.delta_t.to_f64(),
            s.decision.curvature.to_f64(),
            s.decision.radius.to_f64(),
            s.decision.binding.as_str(),
            s.retries
        );
    }
    println!("t = {}", state.t_global.to_decimal());
    for (i, c) in state.x_point.iter().enumerate() {
        println!("x{i} = ({}, {})", c.re.to_decimal(), c.im.to_decimal());
    }
    if let Some(r) = residual {
        println!("residual {r:.3e}");
    }
}
