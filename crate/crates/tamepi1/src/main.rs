use std::io::Write;

fn main() {
    let outcome = tamepi1::cli::run(std::env::args().skip(1));
    print!("{}", outcome.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", outcome.stderr);
    std::process::exit(outcome.code);
}
