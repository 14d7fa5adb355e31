//! `sigmak`: command-line front end for the sigmak-core toolkit.
//!
//! Every subcommand writes one versioned JSON report. Exit status is 0 on
//! success, 2 when an input or hypothesis is rejected and 3 when an
//! iteration fails to converge.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod kspec;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{degree, energy, identities, moments, radial, reduce, solve};

#[derive(Debug, Parser)]
#[command(name = "sigmak", version, about = "Numerical experiments for the sigma_k-curvature equation on the sphere")]
struct Cli {
    /// Worker threads (overrides SIGMAK_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check divergence identities and related pointwise inequalities.
    Identities(identities::Args),
    /// Integrate the radial V_a profile and fit its tail exponent.
    Radial(radial::Args),
    /// Critical points of K and the degree criterion.
    Degree(degree::Args),
    /// Solve the reduced equation at one (xi, mu).
    Reduce(reduce::Args),
    /// Homotopy solve of the axisymmetric curvature equation.
    Solve(solve::Args),
    /// Moments of bubbles and the limiting moment integral.
    Moments(moments::Args),
    /// Boundedness functional and energy of a bubble on a ball or annulus.
    Energy(energy::Args),
    /// Run the subcommand described by a JSON config file.
    Run { config: PathBuf },
    /// Print the JSON schema of config files.
    Schema,
}

fn init_threads(flag: Option<usize>) -> Result<(), String> {
    let from_env = match std::env::var("SIGMAK_THREADS") {
        Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| format!("SIGMAK_THREADS={s:?} is not a count"))?),
        Err(_) => None,
    };
    if let Some(n) = flag.or(from_env).filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn dispatch(command: Command) -> report::Outcome {
    match command {
        Command::Identities(a) => identities::run(a),
        Command::Radial(a) => radial::run(a),
        Command::Degree(a) => degree::run(a),
        Command::Reduce(a) => reduce::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Moments(a) => moments::run(a),
        Command::Energy(a) => energy::run(a),
        Command::Run { .. } => Err(report::Failure::usage("nested run configs are not supported")),
        Command::Schema => Ok(report::Report::raw(config::schema())),
    }
}

/// Replaces a `run` invocation by the command line its config describes;
/// flags given on the outer command line fill in what the config leaves out.
fn resolve(cli: Cli) -> Result<Cli, report::Failure> {
    let Command::Run { config } = &cli.command else {
        return Ok(cli);
    };
    let argv = config::load(config)?;
    let inner = Cli::try_parse_from(argv).map_err(|e| report::Failure::usage(e.to_string()))?;
    Ok(Cli { threads: inner.threads.or(cli.threads), output: inner.output.or(cli.output), command: inner.command })
}

fn main() -> ExitCode {
    let cli = match resolve(Cli::parse()) {
        Ok(cli) => cli,
        Err(f) => {
            eprintln!("sigmak: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("sigmak: {e}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command).and_then(|r| r.emit(cli.output.as_deref())) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("sigmak: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
