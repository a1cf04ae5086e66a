fn main() {
    std::process::exit(opm_drive::cli::run(std::env::args_os()));
}
