fn main() {
    std::process::exit(fsw_core::cli::main_with_args(std::env::args_os()));
}
