use clap::Parser;

use polardist_cli::args::Cli;

fn main() {
    std::process::exit(polardist_cli::run(Cli::parse()));
}
