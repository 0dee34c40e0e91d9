use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orgsim::config::{defaults_json, parse_config};
use orgsim::runner::{run_experiment, threads_from_env};
use orgsim::write_outputs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Run,
    ValidateConfig,
    PrintDefaults,
}

/// Simulates networked ecosystems of organizations over parameter sweeps.
#[derive(Debug, Parser)]
#[command(name = "orgsim", version)]
struct Cli {
    /// JSON configuration; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set rho=0.4` or `--set a=1,b=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_enum, default_value_t = Mode::Run)]
    mode: Mode,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.mode {
        Mode::PrintDefaults => {
            println!("{}", defaults_json());
            ExitCode::SUCCESS
        }
        Mode::ValidateConfig => match parse_config(cli.config.as_deref(), &cli.overrides) {
            Ok(_) => {
                println!("configuration is valid");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Mode::Run => {
            let Some(out) = cli.out.as_deref() else {
                eprintln!("error: --out is required in run mode");
                return ExitCode::from(2);
            };
            let config = match parse_config(cli.config.as_deref(), &cli.overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let results = match run_experiment(&config, threads_from_env()) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            match write_outputs(&config, &results, out) {
                Ok(files) => {
                    eprintln!("wrote {} files to {}", files.len(), out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
