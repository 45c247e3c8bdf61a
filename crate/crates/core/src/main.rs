fn main() {
    std::process::exit(freehyper::cli::run(std::env::args_os()));
}
