use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thinvisc_cli::commands::{cmd_oracle_compare, cmd_rescale, cmd_solve, cmd_validate};
use thinvisc_cli::config::dump_config;
use thinvisc_cli::{read_config, CommandError, Overrides, Status};
use thinvisc_core::SolverChoice;

/// Thin-film Oldroyd-B lubrication solver.
#[derive(Debug, Parser)]
#[command(name = "thinvisc", version, about)]
struct Cli {
    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid size as `N,M` (intervals along x and across the gap).
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Reynolds solver: ode | pointwise | both.
    #[arg(long, global = true)]
    solver: Option<SolverChoice>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve and write pressure.csv, fields.csv and report.json.
    Solve,
    /// Solve and print the validation report.
    Validate,
    /// Write fields mapped to a gap of thickness epsilon h(x).
    Rescale {
        #[arg(long)]
        epsilon: f64,
    },
    /// Compare both solvers and the closed-form oracles.
    OracleCompare,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s
        .split_once(',')
        .ok_or_else(|| format!("expected N,M (got '{s}')"))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| format!("N is not an integer: '{n}'"))?;
    let m = m
        .trim()
        .parse()
        .map_err(|_| format!("M is not an integer: '{m}'"))?;
    Ok((n, m))
}

fn run(cli: Cli) -> Result<Status, CommandError> {
    let Some(path) = &cli.config else {
        eprintln!("error: --config <path> is required");
        return Ok(Status::Parse);
    };
    let overrides = Overrides {
        grid: cli.grid,
        solver: cli.solver,
        out_dir: cli.out.clone(),
    };
    let cfg = read_config(path, &overrides)?;
    if cli.dump_config {
        print!("{}", dump_config(&cfg));
        return Ok(Status::Ok);
    }
    match cli.command {
        Some(Command::Solve) => cmd_solve(&cfg),
        Some(Command::Validate) => cmd_validate(&cfg),
        Some(Command::Rescale { epsilon }) => cmd_rescale(&cfg, epsilon),
        Some(Command::OracleCompare) => cmd_oracle_compare(&cfg),
        None => {
            eprintln!("error: no subcommand given (solve | validate | rescale | oracle-compare)");
            Ok(Status::Parse)
        }
    }
}

fn main() -> ExitCode {
    let status = run(Cli::parse()).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.status()
    });
    ExitCode::from(status as u8)
}
