fn main() {
    std::process::exit(shedad::cli::main_with_args(std::env::args_os()));
}
