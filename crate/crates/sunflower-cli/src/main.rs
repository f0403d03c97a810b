//! `sunflower` — reproducible command-line runs of the fractional sunflower
//! equation toolkit: simulation, stability classification, bifurcation-curve
//! tracing and chaos diagnostics, each emitting self-describing CSV/JSON.

mod cmds;
mod recipe;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Exit codes: 0 ok, 1 regression failure, 2 divergence, 3 insufficient
/// data, 64 usage, 65 domain error.
pub const EXIT_OK: u8 = 0;
pub const EXIT_REGRESSION: u8 = 1;
pub const EXIT_DIVERGENCE: u8 = 2;
pub const EXIT_INSUFFICIENT: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DOMAIN: u8 = 65;

#[derive(Parser)]
#[command(
    name = "sunflower",
    version,
    about = "Fractional-order sunflower delay equation: simulate, classify, trace, diagnose",
    after_help = "Relative --out paths are resolved under $SUNFLOWER_OUT_DIR when it is set."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equation and write a `t,x` CSV trajectory
    #[command(allow_negative_numbers = true)]
    Simulate(cmds::SimulateArgs),
    /// Classify an equilibrium family and print the verdict as JSON
    #[command(allow_negative_numbers = true)]
    Classify(cmds::ClassifyArgs),
    /// Trace a regime-boundary curve m = h(l) in the lm-plane
    #[command(allow_negative_numbers = true)]
    Curve(cmds::CurveArgs),
    /// Estimate the maximum Lyapunov exponent of a simulated run
    #[command(allow_negative_numbers = true)]
    Mle(cmds::MleArgs),
    /// Count the asymptotic cycle multiplicity of a simulated run
    #[command(allow_negative_numbers = true)]
    Cycles(cmds::CyclesArgs),
    /// Emit the delayed-coordinate point cloud (x(t-tau), x(t)) of a run
    #[command(allow_negative_numbers = true)]
    Attractor(cmds::AttractorArgs),
    /// Run a recipe file and compare against its expected values
    Reproduce(cmds::ReproduceArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            // clap renders help to stdout and errors to stderr
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => cmds::simulate(a),
        Command::Classify(a) => cmds::classify(a),
        Command::Curve(a) => cmds::curve(a),
        Command::Mle(a) => cmds::mle(a),
        Command::Cycles(a) => cmds::cycles(a),
        Command::Attractor(a) => cmds::attractor(a),
        Command::Reproduce(a) => cmds::reproduce(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sunflower: {e:#}");
            ExitCode::from(cmds::exit_code_for(&e))
        }
    }
}
