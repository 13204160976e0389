fn main() {
    std::process::exit(regretdro::cli::main_with_args(std::env::args_os()));
}
