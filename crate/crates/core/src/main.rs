use std::process::ExitCode;

use adk_core::cli;

fn main() -> ExitCode {
    if let Err(e) = cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(cli::Status::Error.code() as u8);
    }
    match cli::run(std::env::args_os()) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            let code = if e.use_stderr() {
                cli::Status::Error.code()
            } else {
                0
            };
            let _ = e.print();
            ExitCode::from(code as u8)
        }
    }
}
