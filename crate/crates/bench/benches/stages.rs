use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sertrack::evaldiff::WorkCrew;
use sertrack::QuadDouble;
use sertrack_bench::{cyclic_spec, random_spec, thread_counts, Stage, Workload};

fn stages(c: &mut Criterion) {
    let cases = [
        ("evaldiff", random_spec(Stage::Evaldiff, 16, 8)),
        ("hessians", random_spec(Stage::Hessians, 16, 8)),
        ("blocksolve", random_spec(Stage::Blocksolve, 16, 8)),
        ("newton", random_spec(Stage::Newton, 8, 8)),
        ("pade", random_spec(Stage::Pade, 8, 8)),
        ("shift", random_spec(Stage::Shift, 16, 8)),
        ("C", cyclic_spec(Stage::C, 8, 8)),
        ("R", cyclic_spec(Stage::R, 8, 8)),
    ];
    for (name, spec) in cases {
        let work = Workload::<QuadDouble>::prepare(&spec).expect("workload");
        let mut group = c.benchmark_group(name);
        group.sample_size(10);
        for p in thread_counts() {
            let crew = WorkCrew::new(p).expect("crew");
            group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, _| b.iter(|| work.run(&crew)));
        }
        group.finish();
    }
}

criterion_group!(benches, stages);
criterion_main!(benches);
