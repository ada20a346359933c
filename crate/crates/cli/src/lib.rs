//! Command-line driver: system generation, series Newton, path tracking and
//! stage benchmarks.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod points;
pub mod record;

pub use args::Cli;
pub use error::CliError;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sertrack: {e}");
            e.exit_code()
        }
    }
}

/// Caps a requested thread count at the hardware parallelism, with a
/// warning on standard error.
pub fn cap_threads(requested: usize) -> Result<usize, CliError> {
    if requested == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let hw = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if requested > hw {
        eprintln!("warning: {requested} threads requested, capping at the {hw} available");
        Ok(hw)
    } else {
        Ok(requested)
    }
}
