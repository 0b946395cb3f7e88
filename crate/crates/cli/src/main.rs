fn main() {
    std::process::exit(hclab_cli::run(std::env::args_os()));
}
