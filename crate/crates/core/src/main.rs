fn main() {
    std::process::exit(fusion_census::cli::run(std::env::args_os()));
}
