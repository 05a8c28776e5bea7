use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Parser, Subcommand};
use fuss_spectra::commands::{cmd_density, cmd_enumerate, cmd_moments, cmd_simulate, cmd_validate, Sink};
use fuss_spectra::config::{Flags, RunConfig};
use fuss_spectra::report::Report;

#[derive(Parser)]
#[command(name = "fuss-spectra", version, about = "Singular values of powers of random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuss-Catalan table with exact identity checks.
    Moments(#[command(flatten)] Flags),
    /// Regular (m, p)-paths, their certificates and the count check.
    Enumerate(#[command(flatten)] Flags),
    /// Monte Carlo moments, spectra, ESD distances and truncation.
    Simulate(#[command(flatten)] Flags),
    /// Limit density and CDF as CSV plus an SVG plot.
    Density(#[command(flatten)] Flags),
    /// Every suite at once.
    Validate(#[command(flatten)] Flags),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

type Action = fn(&RunConfig, &Sink, &mut Report) -> anyhow::Result<()>;

fn run(command: Command) -> anyhow::Result<bool> {
    let started = SystemTime::now();
    let (name, flags, action): (&str, Flags, Action) = match command {
        Command::Moments(f) => ("moments", f, cmd_moments),
        Command::Enumerate(f) => ("enumerate", f, cmd_enumerate),
        Command::Simulate(f) => ("simulate", f, cmd_simulate),
        Command::Density(f) => ("density", f, cmd_density),
        Command::Validate(f) => ("validate", f, cmd_validate),
    };
    let cfg = RunConfig::resolve(&flags)?;
    let sink = Sink::for_config(&cfg);
    let mut report = Report::new(cfg.tol_scale);
    action(&cfg, &sink, &mut report)?;
    report.print();
    if let Some(dir) = &cfg.out {
        let path = report.write_manifest(dir, name, &cfg, started)?;
        eprintln!("manifest: {}", path.display());
    }
    Ok(report.all_pass())
}
