use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sertrack::Precision;

#[derive(Debug, Parser)]
#[command(name = "sertrack", version, about = "Track solution paths of polynomial homotopies with power series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a polynomial system file.
    #[command(subcommand)]
    Generate(GenerateKind),
    /// Power series of the solution path at a start point.
    Newton(NewtonArgs),
    /// Track one solution path to the target parameter value.
    Track(TrackArgs),
    /// Time one stage for several thread counts.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// The cyclic n-roots system.
    Cyclic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random coefficients on the unit circle and uniform exponents.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        terms: usize,
        #[arg(long, default_value_t = 8)]
        maxexp: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Shift the constant terms so that a random point is a root and
        /// write that point to this file.
        #[arg(long)]
        anchor: Option<PathBuf>,
        #[arg(long, default_value = "qd")]
        precision: Precision,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add `t` to every polynomial of a system.
    NewtonHomotopy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "qd")]
        precision: Precision,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by `newton` and `track`.
#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    #[arg(long, default_value = "dd")]
    pub precision: Precision,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// JSON run record.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NewtonArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub point: PathBuf,
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, default_value_t = 8)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub start: PathBuf,
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Smallest admissible step; defaults to 1e-8, 1e-16 or 1e-32 by precision.
    #[arg(long)]
    pub minstep: Option<f64>,
    /// Padé degrees as `K,L`; defaults to `d/2,d/2`.
    #[arg(long, value_parser = parse_pade)]
    pub pade: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1.0)]
    pub target: f64,
    #[arg(long, default_value_t = 0.0)]
    pub end_gap: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Also write the end point to this file.
    #[arg(long)]
    pub point_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Evaldiff,
    Hessians,
    Blocksolve,
    Newton,
    Pade,
    Shift,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "R", alias = "r")]
    R,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Evaldiff => "evaldiff",
            Stage::Hessians => "hessians",
            Stage::Blocksolve => "blocksolve",
            Stage::Newton => "newton",
            Stage::Pade => "pade",
            Stage::Shift => "shift",
            Stage::C => "C",
            Stage::R => "R",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub stage: Stage,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Terms per polynomial of the random system; defaults to `n`.
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub maxexp: u32,
    /// Use the cyclic system of this dimension instead of a random one.
    #[arg(long)]
    pub cyclic: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, default_value = "qd")]
    pub precision: Precision,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Runs per thread count; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    /// CSV file with columns stage,n,d,p,seconds.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pade(s: &str) -> Result<(usize, usize), String> {
    let (k, l) = s.split_once(',').ok_or_else(|| format!("expected K,L but got {s:?}"))?;
    let k = k.trim().parse().map_err(|e| format!("bad K: {e}"))?;
    let l = l.trim().parse().map_err(|e| format!("bad L: {e}"))?;
    Ok((k, l))
}
