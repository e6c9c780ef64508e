fn main() {
    std::process::exit(qsim_cli::cli_main(std::env::args_os()));
}
