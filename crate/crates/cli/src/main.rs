fn main() {
    std::process::exit(elliptic_cli::main_with(std::env::args_os()));
}
