use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var("RICCI_SEED").ok();
    let code = ricci_cli::run(
        std::env::args_os(),
        seed.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
