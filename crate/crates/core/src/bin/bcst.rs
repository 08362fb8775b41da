fn main() {
    std::process::exit(bcst::cli::run(std::env::args_os()));
}
