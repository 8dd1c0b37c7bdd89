use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

#[derive(Parser)]
#[command(name = "robinstab", version, about = "Stability of stationary solutions of semilinear Robin problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Find stationary solutions and classify their stability.
    Analyze,
    /// Build a nonlinearity and Robin coefficient with a stable pattern.
    ConstructPattern,
    /// Perturb an equilibrium and integrate the parabolic problem.
    Simulate,
    /// Principal eigenpairs per Fourier mode.
    Eigen,
    /// Print the stability report.
    Report,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let Some(config) = cli.config else {
        eprintln!("error: --config is required");
        return ExitCode::from(1);
    };
    let result = commands::context(&config, cli.out).and_then(|ctx| match cli.command {
        Command::Analyze => commands::analyze(&ctx),
        Command::ConstructPattern => commands::construct(&ctx),
        Command::Simulate => commands::simulate(&ctx),
        Command::Eigen => commands::eigen(&ctx),
        Command::Report => commands::report(&ctx),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
