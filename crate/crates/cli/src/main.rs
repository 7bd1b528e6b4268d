fn main() {
    std::process::exit(hullwalk_cli::run(std::env::args_os()));
}
