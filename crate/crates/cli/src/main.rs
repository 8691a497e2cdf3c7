use std::process::ExitCode;

fn main() -> ExitCode {
    match qdp_cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
