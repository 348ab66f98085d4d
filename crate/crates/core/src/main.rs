use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = mmrr_core::cli::run_with_args(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code.clamp(0, 255) as u8)
}
