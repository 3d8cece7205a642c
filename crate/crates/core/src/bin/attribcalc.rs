use std::io::{self, IsTerminal};
use std::process::ExitCode;

use attribcalc::cli::{run, Styling};

fn main() -> ExitCode {
    let styling = Styling::detect(io::stdout().is_terminal());
    let code = run(std::env::args_os(), &mut io::stdout(), &mut io::stderr(), styling);
    ExitCode::from(code as u8)
}
