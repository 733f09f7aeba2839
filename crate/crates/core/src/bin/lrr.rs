fn main() {
    env_logger::init();
    std::process::exit(lrr::cli::run(std::env::args_os()));
}
