fn main() {
    std::process::exit(whot_cli::run_cli(std::env::args_os()));
}
