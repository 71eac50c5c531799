use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gaugecd::cli::run(std::env::args()) as u8)
}
