fn main() -> std::process::ExitCode {
    copaint_service::cli::main()
}
