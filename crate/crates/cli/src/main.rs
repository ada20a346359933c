use clap::Parser;

fn main() {
    let cli = sertrack_cli::Cli::parse();
    std::process::exit(sertrack_cli::run(cli));
}
