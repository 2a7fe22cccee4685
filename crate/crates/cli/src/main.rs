use std::process::ExitCode;

use clap::Parser;

use qsep::{init_threads, render, run, Cli, CliError};

fn fail(e: &CliError, code: i32) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_owned());
            return fail(&err, 2);
        }
    };
    if let Err(e) = init_threads() {
        return fail(&e, e.exit_code());
    }
    match run(&cli.command) {
        Ok(out) => {
            print!("{}", render(&out.value, cli.pretty));
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => fail(&e, e.exit_code()),
    }
}
