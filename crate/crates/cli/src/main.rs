use std::io;

fn main() {
    let code = dnls_cli::run_cli(std::env::args(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
