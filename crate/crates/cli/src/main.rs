use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::RunConfig;

/// Batch runner for the KdV-Burgers laboratory. Values come from built-in defaults, then
/// `--config`, then flags.
#[derive(Parser)]
#[command(name = "kdvb-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Invocation {
    /// TOML file with [grid], [physics], [data], [solver] and [run] sections
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Whole-line linear flow of a Gaussian
    SolveIvp(Invocation),
    /// Linear half-line problem with boundary data
    SolveIbvp(Invocation),
    /// Picard iteration for the nonlinear half-line problem
    SolveNonlinear(Invocation),
    /// Periodic eigenvalues and gaps
    Spectrum(Invocation),
    /// Observability ratios over random periodic data
    Observability(Invocation),
    /// Positivity threshold and sampled Carleman ratios
    Carleman(Invocation),
    /// Minimal-norm interior control for a bump forcing
    Hum(Invocation),
    /// Non-controllability mode table
    Modes(Invocation),
    /// Steering between two states through an interior control
    Steer(Invocation),
    /// Energy identity ledger for the linear half-line problem
    EnergyAudit(Invocation),
}

impl Command {
    fn split(self) -> (&'static str, Invocation) {
        let [ivp, ibvp, nonlinear, spectrum, observability, carleman, hum, modes, steer, audit] = commands::COMMANDS;
        match self {
            Command::SolveIvp(i) => (ivp, i),
            Command::SolveIbvp(i) => (ibvp, i),
            Command::SolveNonlinear(i) => (nonlinear, i),
            Command::Spectrum(i) => (spectrum, i),
            Command::Observability(i) => (observability, i),
            Command::Carleman(i) => (carleman, i),
            Command::Hum(i) => (hum, i),
            Command::Modes(i) => (modes, i),
            Command::Steer(i) => (steer, i),
            Command::EnergyAudit(i) => (audit, i),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<PathBuf> {
    let (name, inv) = cli.command.split();
    let file = match &inv.config {
        Some(path) => config::load(path, name)?,
        None => RunConfig::default(),
    };
    let resolved = commands::defaults(name).merge(file).merge(inv.flags);
    commands::dispatch(name, &resolved)
}

/// 2 for bad input, 3 for numerical failure.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<kdvb_core::Error>() {
        Some(k) if !k.is_validation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
