fn main() -> std::process::ExitCode {
    pir_codes::cli::run(std::env::args_os())
}
