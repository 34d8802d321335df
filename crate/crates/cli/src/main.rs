fn main() {
    std::process::exit(entdiss_cli::run(std::env::args_os()));
}
