fn main() {
    std::process::exit(sigma_evolve::cli::main_with_args(std::env::args_os()));
}
