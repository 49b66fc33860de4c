fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = beltrami::cli::dispatch(std::env::args_os());
    std::process::exit(code);
}
