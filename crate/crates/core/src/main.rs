fn main() {
    std::process::exit(linf_deform::cli::main_with_args(std::env::args_os()));
}
