fn main() {
    std::process::exit(dpl::cli::run(std::env::args_os()));
}
