fn main() {
    std::process::exit(additive_spectrum_cli::main_with_args(std::env::args_os()));
}
