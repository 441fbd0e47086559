use std::process::ExitCode;

fn main() -> ExitCode {
    tfp_cli::main_with(std::env::args_os())
}
