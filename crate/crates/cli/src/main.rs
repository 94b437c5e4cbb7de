use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args = std::env::args_os().skip(1).collect();
    let code = weatlab_cli::cli::main_with_args(args, &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
