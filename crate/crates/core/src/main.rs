use std::process::ExitCode;

fn main() -> ExitCode {
    fracsym::cli::run_main(std::env::args_os())
}
