fn main() {
    std::process::exit(codebook_prior::cli::run(std::env::args_os()));
}
