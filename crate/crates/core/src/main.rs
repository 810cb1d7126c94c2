use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    modsigma::cli::configure_threads();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let code = modsigma::cli::run(std::env::args_os(), &mut out, &mut std::io::stderr());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
