fn main() {
    std::process::exit(oqc_cli::main_with_args(std::env::args_os()));
}
