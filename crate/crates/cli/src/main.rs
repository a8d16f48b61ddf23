//! `qbc5`: seeded experiment runner for the bit-commitment analyses.
//!
//! Exit status: 0 when every check passes, 1 when a scientific check fails,
//! 2 on a usage error.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, Subcommand};

use commands::*;
use output::Report;

#[derive(Debug, Parser)]
#[command(name = "qbc5", version, about, args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the teleportation identity for every member and outcome.
    TeleportCheck(TeleportCheck),
    /// Run the protocol once and report the transcript and verdict.
    RunProtocol(RunProtocol),
    /// Optimize Adam's cheating strategies.
    AdamOpt(AdamOpt),
    /// Babe's guess rate against the concealment bound.
    BabeConceal(BabeConceal),
    /// Sample-and-test detection failure: exact, bound and simulation.
    Ensemble(Ensemble),
    /// The repeated checking game: closed forms, oracle and simulation.
    Game(Game),
}

fn execute(cli: &Cli) -> Result<Report> {
    let c = &cli.common;
    match &cli.command {
        Command::TeleportCheck(a) => teleport_check(a, c),
        Command::RunProtocol(a) => run_protocol(a, c),
        Command::AdamOpt(a) => adam_opt(a, c),
        Command::BabeConceal(a) => babe_conceal(a, c),
        Command::Ensemble(a) => ensemble(a, c),
        Command::Game(a) => game(a, c),
    }
}

fn emit(report: &Report, cli: &Cli) -> Result<()> {
    let c = &cli.common;
    match &c.out {
        Some(path) => {
            let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write(c.format, &mut f)?;
            f.flush()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            report.write(c.format, &mut out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let names: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect();
    let args = match config::expand(std::env::args().collect(), &names) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report = match execute(&cli).and_then(|r| emit(&r, &cli).map(|()| r)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if report.passed() {
        eprintln!("{}: pass ({} rows)", report.command, report.rows.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: FAIL", report.command);
        for f in &report.failures {
            eprintln!("  {f}");
        }
        ExitCode::from(1)
    }
}
