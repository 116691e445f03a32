fn main() {
    std::process::exit(aoci_cli::run(std::env::args_os()));
}
