use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use coupled_chains::harness::{
    self, Command, ExitStatus, ExperimentConfig, Family, Overrides, Preset,
};

/// Spectral and dispersive experiments on a quasi-periodic chain coupled to a free one.
#[derive(Debug, Parser)]
#[command(name = "coupled-chains", version)]
struct Cli {
    /// Overrides the command in the config.
    command: Option<Command>,
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a built-in config instead of a file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<Preset>,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match (&cli.config, cli.preset) {
        (Some(path), _) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
        (None, Some(p)) => ExperimentConfig::preset(p),
        (None, None) => ExperimentConfig::default(),
    };
    Overrides {
        command: cli.command,
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
        n: cli.n,
        m: cli.m,
        t_max: cli.tmax,
        family: cli.family,
        amplitude: cli.amplitude,
        omega: cli.omega,
        theta: cli.theta,
    }
    .apply(&mut config);

    if cli.print_config {
        return match config.validate().and_then(|_| config.to_toml_string()) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        };
    }

    match harness::run(&config) {
        Ok(report) => {
            for c in &report.checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                eprintln!(
                    "{mark} {:<28} {:>12.3e} (tol {:.1e})",
                    c.name, c.residual, c.tolerance
                );
            }
            for a in &report.artifacts {
                println!("{}", a.display());
            }
            let status = report.status();
            if status != ExitStatus::Success {
                eprintln!(
                    "{}: failed invariants: {}",
                    report.command.name(),
                    report.failed().join(", ")
                );
            }
            ExitCode::from(status.code() as u8)
        }
        Err(e) => fail(&e),
    }
}

fn fail(err: &coupled_chains::Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(ExitStatus::of_error(err).code() as u8)
}
