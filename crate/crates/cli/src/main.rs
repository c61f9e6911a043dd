//! `compacton`: batch front end for similarity analysis, closed-form waves,
//! K(n,m) simulation and the compacton frame.
//!
//! Exit codes: 0 success, 1 usage, 2 equation parse error, 3 numeric
//! failure, 4 blow-up. Whenever files are written, their directory also gets
//! a `manifest.json` recording the run, including failed ones.

mod analyze;
mod args;
mod error;
mod frame;
mod output;
mod simulate;
mod sweep;
mod waves;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::error::Result;
use crate::output::Run;

#[derive(Debug, Parser)]
#[command(name = "compacton", version, about = "Amplitude-width-velocity analysis, compactons and the compacton frame")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Similarity relation, width law and qualitative report of an equation.
    Analyze(analyze::AnalyzeArgs),
    /// Width roots over an amplitude-velocity grid.
    Sweep(sweep::SweepArgs),
    /// Sample a closed-form traveling wave.
    Exact(waves::ExactArgs),
    /// Finite-difference residual of a closed-form wave in its equation.
    Residual(waves::ResidualArgs),
    /// Integrate a conservation-form equation on a periodic grid.
    Simulate(simulate::SimulateArgs),
    /// Compacton frame and Morlet utilities.
    #[command(subcommand)]
    Frame(frame::FrameCommand),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Sweep(_) => "sweep",
            Command::Exact(_) => "exact",
            Command::Residual(_) => "residual",
            Command::Simulate(_) => "simulate",
            Command::Frame(frame::FrameCommand::Check(_)) => "frame check",
            Command::Frame(frame::FrameCommand::Expand(_)) => "frame expand",
            Command::Frame(frame::FrameCommand::Square(_)) => "frame square",
            Command::Frame(frame::FrameCommand::Morlet(_)) => "frame morlet",
        }
    }
}

fn dispatch(cmd: &Command, run: &mut Run) -> Result<()> {
    match cmd {
        Command::Analyze(a) => analyze::run(a, run),
        Command::Sweep(a) => sweep::run(a, run),
        Command::Exact(a) => waves::exact(a, run),
        Command::Residual(a) => waves::residuals(a, run),
        Command::Simulate(a) => simulate::run(a, run),
        Command::Frame(f) => frame::run(f, run),
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let mut run = Run::new(cli.command.name(), argv);
    let outcome = dispatch(&cli.command, &mut run);
    if let Err(e) = run.finish(&outcome) {
        eprintln!("error: could not write manifest: {e}");
        std::process::exit(3);
    }
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
