fn main() -> std::process::ExitCode {
    chemostat::cli::main()
}
