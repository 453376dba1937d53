fn main() {
    std::process::exit(swapscope::cli::run(std::env::args_os()));
}
