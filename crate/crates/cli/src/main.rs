fn main() {
    std::process::exit(roughpath_cli::run_cli(std::env::args_os()));
}
