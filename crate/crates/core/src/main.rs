fn main() {
    std::process::exit(warped_poisson::run_cli());
}
