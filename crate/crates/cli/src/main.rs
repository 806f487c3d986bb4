fn main() {
    std::process::exit(triadic_cli::run(std::env::args_os()));
}
