use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nedkit::cli::run())
}
