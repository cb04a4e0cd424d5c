fn main() {
    std::process::exit(fuzzynorm_cli::run(std::env::args_os()));
}
