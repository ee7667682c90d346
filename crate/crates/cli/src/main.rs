use clap::Parser;
use foonplan_cli::config::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = foonplan_cli::commands::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
