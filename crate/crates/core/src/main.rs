fn main() {
    // Library warnings are opt-in through RUST_LOG; the CLI reports its own.
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let code = qbm_core::cli::run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
