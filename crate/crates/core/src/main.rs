fn main() {
    std::process::exit(mfe_core::cli::run(std::env::args_os()));
}
