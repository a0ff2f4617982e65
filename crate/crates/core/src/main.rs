fn main() {
    std::process::exit(plap_core::cli::run(std::env::args_os()));
}
