fn main() {
    std::process::exit(finmodel_cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr()));
}
