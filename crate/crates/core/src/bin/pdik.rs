use std::io::Write;

fn main() {
    let outcome = pdik::cli::run_command(std::env::args_os());
    if !outcome.stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        if out.write_all(outcome.stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
            eprintln!("pdik-error[io]: cannot write report to stdout");
            std::process::exit(2);
        }
    }
    if let Some(msg) = outcome.stderr {
        eprintln!("{msg}");
    }
    std::process::exit(outcome.code);
}
