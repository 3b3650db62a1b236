use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(contour_chain::cli::run() as u8)
}
