fn main() {
    std::process::exit(forestfire::cli::main_with_args(std::env::args_os()));
}
