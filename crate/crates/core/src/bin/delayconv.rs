fn main() {
    std::process::exit(delayconv::cli::run(std::env::args_os()));
}
