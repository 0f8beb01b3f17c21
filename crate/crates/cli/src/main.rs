use std::process::ExitCode;

use kerrkit_cli::{parse_config, run, CliError, SEED_ENV};

fn main() -> ExitCode {
    let env_seed = std::env::var(SEED_ENV).ok();
    match parse_config(std::env::args_os(), env_seed.as_deref()).and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let code = u8::try_from(e.exit_code()).unwrap_or(2);
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("kerrkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
