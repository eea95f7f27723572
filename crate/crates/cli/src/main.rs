use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(advreg_cli::run(std::env::args_os()) as u8)
}
