use std::path::Path;
use std::process::{Command, Output};

use sertrack::polysys::{generate_cyclic, parse_system};
use sertrack::{Complex, DoubleDouble, QuadDouble, Real};
use sertrack_cli::points::parse_points;
use sertrack_cli::record::RunRecord;

fn sertrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sertrack")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sqrt_homotopy(dir: &Path) -> (String, String) {
    let sys = dir.join("sys.txt");
    let hom = dir.join("hom.txt");
    let start = dir.join("start.txt");
    std::fs::write(&sys, "n 1 d 0\nx0^2 - 1;\n").unwrap();
    std::fs::write(&start, "n 1\n(1,0)\n").unwrap();
    let o = sertrack(&["generate", "newton-homotopy", "--in", path(&sys), "--out", path(&hom)]);
    assert!(o.status.success(), "{o:?}");
    (path(&hom).to_string(), path(&start).to_string())
}

#[test]
fn generate_cyclic_matches_the_library() {
    let o = sertrack(&["generate", "cyclic", "--n", "4"]);
    assert!(o.status.success());
    let sys = parse_system::<QuadDouble>(&stdout(&o)).unwrap();
    assert_eq!(sys, generate_cyclic::<QuadDouble>(4, 0).unwrap());
}

#[test]
fn newton_homotopy_adds_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let (hom, _) = sqrt_homotopy(dir.path());
    let sys = parse_system::<QuadDouble>(&std::fs::read_to_string(hom).unwrap()).unwrap();
    assert!(sys.is_homotopy());
    assert_eq!(sys.num_monomials(), 3);
    let v = sys.eval_naive(&[Complex::one()], Complex::from_f64(0.25, 0.0)).unwrap();
    assert_eq!(v[0], Complex::from_f64(0.25, 0.0));
}

#[test]
fn anchored_random_system_vanishes_at_its_point() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.txt");
    let pt = dir.path().join("pt.txt");
    let o = sertrack(&[
        "generate",
        "random",
        "--n",
        "3",
        "--terms",
        "4",
        "--seed",
        "5",
        "--anchor",
        path(&pt),
        "--out",
        path(&sys),
    ]);
    assert!(o.status.success(), "{o:?}");
    let s = parse_system::<QuadDouble>(&std::fs::read_to_string(&sys).unwrap()).unwrap();
    let x = parse_points::<QuadDouble>(&std::fs::read_to_string(&pt).unwrap()).unwrap();
    let r = s.eval_naive(&x, Complex::zero()).unwrap();
    assert!(r.iter().all(|c| c.abs().to_f64() < 1e-60));
}

#[test]
fn track_sqrt_to_three_quarters() {
    let dir = tempfile::tempdir().unwrap();
    let (hom, start) = sqrt_homotopy(dir.path());
    let rec = dir.path().join("run.json");
    let end = dir.path().join("end.txt");
    let o = sertrack(&[
        "track",
        "--system",
        &hom,
        "--start",
        &start,
        "--precision",
        "dd",
        "--degree",
        "8",
        "--threads",
        "4",
        "--target",
        "0.75",
        "--out",
        path(&rec),
        "--point-out",
        path(&end),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = RunRecord::from_json(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(r.status, "ok");
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.config["precision"], "dd");
    assert_eq!(DoubleDouble::parse_decimal(r.t_final.as_deref().unwrap()).unwrap(), DoubleDouble::from_f64(0.75));
    assert!(!r.step_log.is_empty());
    assert!(r.stage_seconds.contains_key("newton"));
    let x = parse_points::<DoubleDouble>(&std::fs::read_to_string(&end).unwrap()).unwrap();
    assert!((x[0] - Complex::from_f64(0.5, 0.0)).abs().to_f64() < 1e-20);
    assert!(r.residual.unwrap() < 1e-20);
}

#[test]
fn newton_prints_the_series() {
    let dir = tempfile::tempdir().unwrap();
    let (hom, start) = sqrt_homotopy(dir.path());
    let rec = dir.path().join("newton.json");
    let o = sertrack(&["newton", "--system", &hom, "--point", &start, "--degree", "4", "--out", path(&rec)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("t^1: (-0.5, 0)"), "{}", stdout(&o));
    let r = RunRecord::from_json(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    let series = &r.newton.unwrap().series[0];
    assert_eq!(series.len(), 5);
    assert_eq!(series[2], ["-0.125".to_string(), "0".to_string()]);
}

#[test]
fn missing_start_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (hom, _) = sqrt_homotopy(dir.path());
    let o = sertrack(&["track", "--system", &hom, "--start", path(&dir.path().join("nope.txt"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn dimension_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (hom, _) = sqrt_homotopy(dir.path());
    let start = dir.path().join("two.txt");
    std::fs::write(&start, "n 2\n(1,0)\n(1,0)\n").unwrap();
    let o = sertrack(&["track", "--system", &hom, "--start", path(&start)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singular_start_exits_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("cyclic.txt");
    let hom = dir.path().join("hom.txt");
    let start = dir.path().join("start.txt");
    let rec = dir.path().join("run.json");
    assert!(sertrack(&["generate", "cyclic", "--n", "4", "--out", path(&sys)]).status.success());
    assert!(sertrack(&["generate", "newton-homotopy", "--in", path(&sys), "--out", path(&hom)]).status.success());
    std::fs::write(&start, "n 4\n(1,0)\n(-1,0)\n(-1,0)\n(1,0)\n").unwrap();
    let o = sertrack(&[
        "track",
        "--system",
        path(&hom),
        "--start",
        path(&start),
        "--precision",
        "qd",
        "--target",
        "0.5",
        "--out",
        path(&rec),
    ]);
    assert_eq!(o.status.code(), Some(5));
    let r = RunRecord::from_json(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(r.status, "error");
    assert_eq!(r.exit_code, 5);
    assert!(r.step_log.is_empty());
}

fn bench_rows(out: &Output) -> Vec<Vec<String>> {
    stdout(out).lines().skip(1).map(|l| l.split_whitespace().map(str::to_string).collect()).collect()
}

#[test]
fn bench_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let args = [
        "bench",
        "evaldiff",
        "--n",
        "4",
        "--degree",
        "4",
        "--threads",
        "1,2",
        "--precision",
        "dd",
        "--out",
        path(&csv),
    ];
    let a = sertrack(&args);
    let b = sertrack(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let (ra, rb) = (bench_rows(&a), bench_rows(&b));
    assert!(!ra.is_empty());
    assert_eq!(ra[0][3], "1");
    assert_eq!(ra[0][5], "1.000");
    let checksums = |r: &[Vec<String>]| r.iter().map(|row| row[7].clone()).collect::<Vec<_>>();
    assert_eq!(checksums(&ra), checksums(&rb));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("stage,n,d,p,seconds"));
    assert!(lines.next().unwrap().starts_with("evaldiff,4,4,1,"));
}

#[test]
fn every_bench_stage_runs() {
    for stage in ["evaldiff", "hessians", "blocksolve", "newton", "pade", "shift", "C", "R"] {
        let o = sertrack(&["bench", stage, "--n", "3", "--degree", "4", "--precision", "d"]);
        assert!(o.status.success(), "{stage}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(bench_rows(&o)[0][0], stage);
    }
}
