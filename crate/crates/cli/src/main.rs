use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod config;

use commands::Outcome;
use config::{ComplexValue, RunConfig};
use maxwell_sie::SieError;

#[derive(Parser)]
#[command(name = "maxwell-sie", version, about = "Stabilized surface integral equation solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scattering problem and write a JSON report.
    Solve(RunArgs),
    /// Condition and constraint diagnostics over a list of frequencies (CSV).
    Sweep(RunArgs),
    /// Locate singular wavenumber pairs for the unit sphere.
    SingularFind(RunArgs),
    /// Finite-dimensional pencil experiments (CSV).
    Pencil(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    config: PathBuf,
    /// Stabilization parameter, `re` or `re,im`.
    #[arg(long)]
    xi: Option<String>,
    /// Angular frequency.
    #[arg(long)]
    omega: Option<f64>,
    /// Polar quadrature order (azimuthal order becomes twice this).
    #[arg(long)]
    order: Option<usize>,
}

fn parse_xi(s: &str) -> Result<ComplexValue, SieError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| SieError::Input(format!("cannot parse --xi value {s:?}")));
    match parts.as_slice() {
        [re] => Ok(ComplexValue::Real(num(re)?)),
        [re, im] => Ok(ComplexValue::Pair([num(re)?, num(im)?])),
        _ => Err(SieError::Input(format!("cannot parse --xi value {s:?}"))),
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, SieError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(x) = &args.xi {
        cfg.solver.xi = parse_xi(x)?;
    }
    if let Some(w) = args.omega {
        let m = cfg.medium.as_mut().ok_or_else(|| SieError::Input("--omega needs a medium block".into()))?;
        m.omega = w;
        m.build()?;
    }
    if let Some(n) = args.order {
        cfg.geometry.as_mut().ok_or_else(|| SieError::Input("--order needs a geometry block".into()))?.set_order(n);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Outcome, SieError> {
    let (args, cmd): (&RunArgs, fn(&RunConfig) -> Result<Outcome, SieError>) = match &cli.command {
        Command::Solve(a) => (a, commands::solve),
        Command::Sweep(a) => (a, commands::sweep),
        Command::SingularFind(a) => (a, commands::singular_find),
        Command::Pencil(a) => (a, commands::pencil),
    };
    cmd(&load(args)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(o) => ExitCode::from(o.code()),
        Err(SieError::NearSingular { sigma_min, ratio }) => {
            eprintln!("error: near-singular system (sigma_min = {sigma_min:.3e}, ratio = {ratio:.3e})");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
