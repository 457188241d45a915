fn main() {
    std::process::exit(orbichar::cli::main_with_args(std::env::args_os()));
}
