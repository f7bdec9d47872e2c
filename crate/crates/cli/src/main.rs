use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = localind_cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
        &localind_cli::Methods::default(),
    );
    ExitCode::from(code as u8)
}
