fn main() {
    std::process::exit(mgl_cli::run(std::env::args_os()));
}
