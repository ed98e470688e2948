use clap::Parser;

fn main() {
    let cli = otop_cli::Cli::parse();
    if let Err(error) = otop_cli::run(cli) {
        eprintln!("error: {error}");
        std::process::exit(error.exit_code());
    }
}
