use clap::Parser;

fn main() {
    if let Err(e) = synpar_cli::run(synpar_cli::Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
