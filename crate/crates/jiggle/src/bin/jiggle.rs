fn main() -> std::process::ExitCode {
    jiggle::cli::main()
}
