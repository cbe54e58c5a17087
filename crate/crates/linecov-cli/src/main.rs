use std::process::ExitCode;

fn main() -> ExitCode {
    linecov_cli::run()
}
