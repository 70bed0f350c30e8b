fn main() {
    std::process::exit(gelation::cli::main_with_args(std::env::args_os()));
}
