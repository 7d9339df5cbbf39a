use std::io;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let stdin = io::stdin();
    let code = stackal::cli::run(std::env::args_os(), &mut stdin.lock(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
