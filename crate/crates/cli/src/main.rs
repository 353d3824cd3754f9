fn main() {
    env_logger::init();
    std::process::exit(phasewalk_cli::main_impl(std::env::args_os()));
}
