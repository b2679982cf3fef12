fn main() {
    std::process::exit(bernstein_cli::run(std::env::args_os()));
}
