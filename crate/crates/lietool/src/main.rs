fn main() {
    std::process::exit(lietool::cli::main_with_args(std::env::args_os()));
}
