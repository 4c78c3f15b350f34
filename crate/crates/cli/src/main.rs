//! Command-line driver: every subcommand runs a verification pipeline on
//! the configured weight/grid/operator, writes a canonical JSON report plus
//! artifacts into a run directory, and exits 0 (all checks passed),
//! 1 (configuration or I/O problem), 2 (a check failed) or
//! 3 (nothing failed but something stayed inconclusive).

mod config;
mod pipelines;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use whlab_core::io;

use config::RunConfig;
use pipelines::Ctx;

#[derive(Parser)]
#[command(
    name = "whlab",
    version,
    about = "weighted half-line shift and convolution laboratory"
)]
struct Cli {
    /// TOML settings file (flat `section.key` namespace)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// override one setting, e.g. --set grid.count=800 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// run directory for the report and artifacts
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// check that the weight's translation ratios stabilize on growing windows
    WeightsCheck,
    /// compare dense shift norms with the exact weight-ratio formula
    Norms,
    /// measure the exponential growth orders of both shift directions
    Growth,
    /// sweep sigma_min(zI - T) over a rectangle of complex nodes
    Pseudospec,
    /// bound the tilted symbol by the operator norm and export its samples
    Symbol,
    /// drive the operator with a wave-packet quasimode and score the residual
    Witness,
    /// run the full verification pipeline
    VerifyAll,
}

impl Command {
    fn label(self) -> &'static str {
        match self {
            Command::WeightsCheck => "weights-check",
            Command::Norms => "norms",
            Command::Growth => "growth",
            Command::Pseudospec => "pseudospec",
            Command::Symbol => "symbol",
            Command::Witness => "witness",
            Command::VerifyAll => "verify-all",
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version travel through clap's error path but are not
            // failures; real usage errors are configuration errors here
            use clap::error::ErrorKind;
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if benign { 0 } else { 1 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: &Cli) -> whlab_core::Result<i32> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output_dir());
    std::fs::create_dir_all(&dir)?;

    let mut ctx = Ctx::new(&cfg, &dir);
    match cli.command {
        Command::WeightsCheck => pipelines::weights_check(&mut ctx)?,
        Command::Norms => pipelines::norms(&mut ctx)?,
        Command::Growth => pipelines::growth(&mut ctx)?,
        Command::Pseudospec => pipelines::pseudospec(&mut ctx)?,
        Command::Symbol => pipelines::symbol(&mut ctx)?,
        Command::Witness => pipelines::witness(&mut ctx)?,
        Command::VerifyAll => pipelines::verify_all(&mut ctx)?,
    }
    let Ctx {
        checks, artifacts, ..
    } = ctx;

    let rep = report::finalize(cli.command.label(), cfg.echo(), checks, artifacts)?;
    io::write_json_canonical(&dir.join("report.json"), &rep)?;
    let mut files: Vec<&str> = rep.artifacts.iter().map(String::as_str).collect();
    files.push("report.json");
    files.sort_unstable();
    io::write_json_canonical(
        &dir.join("manifest.json"),
        &serde_json::json!({ "command": rep.command, "files": files }),
    )?;

    for c in &rep.checks {
        println!(
            "check {}: {} (measured {:.6e} {} {:.6e})",
            c.name,
            c.status.word(),
            c.measured,
            c.relation.symbol(),
            c.bound
        );
    }
    println!("overall: {}", rep.overall.word());
    Ok(report::exit_code(rep.overall))
}
