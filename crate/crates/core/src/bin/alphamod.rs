fn main() {
    std::process::exit(alphamod::cli_reports::main_with_args(std::env::args_os()));
}
