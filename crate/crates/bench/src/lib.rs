//! Workload presets for the criterion benches.

pub use sertrack_cli::args::Stage;
pub use sertrack_cli::bench::{Workload, WorkloadSpec};

/// Random system of dimension `n` with `n` terms per polynomial and
/// exponents up to 4, at series degree `d`.
pub fn random_spec(stage: Stage, n: usize, d: usize) -> WorkloadSpec {
    WorkloadSpec { stage, n, terms: None, maxexp: 4, cyclic: None, degree: d, seed: 1 }
}

/// Cyclic `n`-roots anchored at a random point, at series degree `d`.
pub fn cyclic_spec(stage: Stage, n: usize, d: usize) -> WorkloadSpec {
    WorkloadSpec { stage, n, terms: None, maxexp: 1, cyclic: Some(n), degree: d, seed: 1 }
}

/// Thread counts worth measuring on this machine.
pub fn thread_counts() -> Vec<usize> {
    let hw = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut v: Vec<usize> = [1, 2, 4, 8].into_iter().filter(|&p| p <= hw).collect();
    if !v.contains(&hw) {
        v.push(hw);
    }
    v
}
