use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = hqr_core::cli::run_args(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.exit as u8)
}
