fn main() {
    std::process::exit(jointchoice::cli::run(std::env::args_os()));
}
