fn main() {
    std::process::exit(planar_push::cli::run(std::env::args_os()));
}
