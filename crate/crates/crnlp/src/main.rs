fn main() {
    std::process::exit(crnlp::cli::run(std::env::args_os()));
}
