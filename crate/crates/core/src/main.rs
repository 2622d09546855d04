fn main() {
    std::process::exit(cousin::cli::run(std::env::args_os()));
}
