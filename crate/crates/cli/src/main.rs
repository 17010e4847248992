fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("HODGE_LOG")).format_timestamp(None).init();
    std::process::exit(homology_cli::run_cli(std::env::args_os()));
}
