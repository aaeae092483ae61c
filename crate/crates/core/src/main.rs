use std::io::Write;

fn main() {
    let out = rbss::cli::dispatch(std::env::args_os());
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    if !out.stderr.is_empty() {
        let msg = out.stderr.trim_end();
        if out.code == 2 && !msg.starts_with("error") && !msg.starts_with("Usage") {
            eprintln!("error: {msg}");
        } else {
            eprintln!("{msg}");
        }
    }
    std::process::exit(out.code);
}
