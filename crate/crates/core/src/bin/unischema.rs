fn main() {
    std::process::exit(unischema::cli::run(std::env::args_os()));
}
