use std::process::ExitCode;

fn main() -> ExitCode {
    fvgrad::cli::run(std::env::args_os())
}
