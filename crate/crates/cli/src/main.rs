use std::process::ExitCode;

fn main() -> ExitCode {
    taumc_cli::run()
}
