fn main() {
    std::process::exit(lorentz_lab::cli::main_with_args(std::env::args_os()));
}
