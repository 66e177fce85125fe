mod args;
mod commands;
mod error;
mod fetch;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{parse_guess_kind, Cli, Command, InitialGuess, RunConfig, SubcommandKind};
use error::CliError;

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve(a) => {
            let mut cfg = RunConfig::from_common(SubcommandKind::Solve, &a.common)?;
            cfg.save_vectors = a.save_vectors;
            commands::dispatch(&cfg)
        }
        Command::Estimate(a) => commands::dispatch(&RunConfig::from_common(SubcommandKind::Estimate, &a)?),
        Command::CompareFilters(a) => {
            let mut cfg = RunConfig::from_common(SubcommandKind::CompareFilters, &a.common)?;
            cfg.guess = parse_guess_kind(&a.init)?;
            commands::dispatch(&cfg)
        }
        Command::Refine(a) => {
            let mut cfg = RunConfig::from_common(SubcommandKind::Refine, &a.common)?;
            cfg.guess = match (a.guess_u, a.guess_w, a.init) {
                (Some(u), Some(w), _) => InitialGuess::Files { u, w },
                (_, _, Some(kind)) => match parse_guess_kind(&kind)? {
                    InitialGuess::Random => return Err(CliError::Usage("refine needs --guess-u/--guess-w or --init negative|nearly-negative|noisy:q".into())),
                    g => g,
                },
                _ => return Err(CliError::Usage("refine needs --guess-u/--guess-w or --init negative|nearly-negative|noisy:q".into())),
            };
            commands::dispatch(&cfg)
        }
        Command::Fetch(a) => {
            let cache = fetch::cache_dir(a.cache.as_deref());
            let path = fetch::fetch(&a.name, &cache)?;
            println!("{}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version go to stdout with status 0; every other
            // argument error is a usage error (1), keeping 2 for stagnation.
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
