fn main() {
    std::process::exit(nuclear_teleport::cli::main_with_args(std::env::args_os()));
}
