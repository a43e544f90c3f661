use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(omsim::run(std::env::args_os()))
}
