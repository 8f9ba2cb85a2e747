use std::io::{stderr, stdout};

fn main() {
    let code = plh_cli::run_cli(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
