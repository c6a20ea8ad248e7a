fn main() {
    std::process::exit(genconvex::cli::main_with_args(std::env::args_os()));
}
