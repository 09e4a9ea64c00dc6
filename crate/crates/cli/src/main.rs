use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use groupoid_pmu::cli::{cmd_all, cmd_fixed, cmd_hopf, cmd_legs, cmd_reps, cmd_verify, Options, Target};
use groupoid_pmu::report::Report;

/// Verify pseudo-multiplicative unitaries of finite groupoids.
#[derive(Parser)]
#[command(name = "gpmu", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Unitarity, intertwining relations, pentagon and cross-checks.
    Verify(Common),
    /// Legs, leg relations, regularity and the duality pairing.
    Legs(Common),
    /// Hopf C*-bimodule checks for both legs.
    Hopf(Common),
    /// Fixed and cofixed elements, counit and Haar weight.
    Fixed(Common),
    /// Representations, corepresentations and groupoid representations.
    Reps(Common),
    /// Every suite.
    All(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// A spec file, or `builtin:<name>` with name unit<n>, pair<n>, z<n>,
    /// dsum:<a>,<b> or prod:<a>,<b>.
    target: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Overrides of the measure on units, `u=w,...`.
    #[arg(long)]
    measure: Option<String>,
    /// Seed for the randomized property checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn load(arg: &str) -> Result<Target> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return Ok(Target::builtin(name)?);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    Ok(Target::from_spec(arg, &text)?)
}

fn run(cmd: &Cmd) -> Result<(Report, Format)> {
    let (f, c): (fn(&Target, Options) -> groupoid_pmu::Result<Report>, &Common) = match cmd {
        Cmd::Verify(c) => (cmd_verify, c),
        Cmd::Legs(c) => (cmd_legs, c),
        Cmd::Hopf(c) => (cmd_hopf, c),
        Cmd::Fixed(c) => (cmd_fixed, c),
        Cmd::Reps(c) => (cmd_reps, c),
        Cmd::All(c) => (cmd_all, c),
    };
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        bail!("--tol must be a positive number");
    }
    let mut t = load(&c.target)?;
    if let Some(m) = &c.measure {
        t.override_measure(m)?;
    }
    Ok((f(&t, Options { tol: c.tol, seed: c.seed })?, c.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok((r, format)) => {
            let out = match format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json() + "\n",
            };
            // a closed pipe is not a verification failure
            let _ = std::io::stdout().write_all(out.as_bytes());
            if r.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
