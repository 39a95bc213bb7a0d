fn main() {
    std::process::exit(prandtl_lab::cli::run(std::env::args_os()));
}
