use clap::Parser;
use tracing_subscriber::EnvFilter;

use repolabel_service::cli::{run, Cli, Command};

fn main() {
    let cli = Cli::parse();
    let default_level = match cli.command {
        Command::Serve { .. } => "info",
        _ => "warn",
    };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)))
        .with_writer(std::io::stderr)
        .init();
    let code = run(cli, &mut std::io::stdout().lock());
    std::process::exit(code);
}
