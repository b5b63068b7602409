fn main() -> std::process::ExitCode {
    influence::cli::main_with_args(std::env::args_os())
}
