fn main() {
    std::process::exit(qtm_cli::run(std::env::args_os()));
}
