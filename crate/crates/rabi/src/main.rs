fn main() {
    std::process::exit(rabi::cli::main_with(std::env::args_os()));
}
