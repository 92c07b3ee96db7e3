//! Command-line front end; see `ecrel --help`.

fn main() {
    let code = ecrel::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
