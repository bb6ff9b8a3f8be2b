use clap::Parser;

fn main() {
    let cli = essc_cli::Cli::parse();
    if let Err(e) = essc_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
