use std::process::ExitCode;

fn main() -> ExitCode {
    ouest::cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
