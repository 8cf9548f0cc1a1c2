use clap::Parser;
use minkpoly_cli::{configure_threads, run_and_write, RunConfig};

fn main() {
    configure_threads();
    let cfg = RunConfig::parse();
    std::process::exit(run_and_write(&cfg));
}
