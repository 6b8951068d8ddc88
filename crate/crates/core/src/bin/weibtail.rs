fn main() {
    std::process::exit(weibtail::cli::run(std::env::args_os()));
}
