fn main() {
    std::process::exit(dyadic_pd::cli::run(std::env::args_os()));
}
