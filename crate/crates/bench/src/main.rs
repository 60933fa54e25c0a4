use std::process::ExitCode;

use clap::Parser;
use ridgelab_bench::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
