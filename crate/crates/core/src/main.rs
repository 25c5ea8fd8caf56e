use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (code, text) = projrep::cli::run_args(std::env::args_os());
    let written = if code == projrep::cli::EXIT_USAGE {
        std::io::stderr().write_all(text.as_bytes())
    } else {
        std::io::stdout().write_all(text.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(projrep::cli::EXIT_INPUT as u8);
    }
    ExitCode::from(code as u8)
}
