fn main() {
    std::process::exit(spd_median_cli::run_cli(std::env::args_os()));
}
