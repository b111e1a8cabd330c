use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod settings;

use args::Cli;

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;
const EXIT_EXPERIMENT: u8 = 5;
const EXIT_IO: u8 = 6;

fn exit_code(err: &chemoeda::Error) -> u8 {
    use chemoeda::Error::*;
    match err {
        Parse { .. } => EXIT_PARSE,
        Invariant(_) => EXIT_INVARIANT,
        Config(_) | Selection(_) | Dimension { .. } | Encoding(_) => EXIT_USAGE,
        Experiment(_) | Numeric(_) | Structure(_) => EXIT_EXPERIMENT,
        Io(_) => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot set up {jobs} worker threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
