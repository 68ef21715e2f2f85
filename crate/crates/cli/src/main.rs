use std::process::ExitCode;

use clap::Parser;
use synthlab_cli::args::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    synthlab_cli::exit_status(run(Cli::parse()))
}
