use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mgl_cli::run(std::env::args_os()))
}
