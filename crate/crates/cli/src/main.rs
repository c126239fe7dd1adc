use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CRNLAP_LOG")).init();
    let outcome = crnlap_cli::run(std::env::args_os());
    std::io::stdout().write_all(outcome.stdout.as_bytes()).ok();
    std::io::stderr().write_all(outcome.stderr.as_bytes()).ok();
    std::process::exit(outcome.code);
}
