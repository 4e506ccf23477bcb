fn main() {
    std::process::exit(pcurv::cli::run(std::env::args_os()));
}
