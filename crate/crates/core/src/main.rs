fn main() {
    std::process::exit(tortoise_scatter::cli::run());
}
