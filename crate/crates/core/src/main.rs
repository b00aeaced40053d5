use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;

use iso_cycles::cli::{self, parse_box, CliError, RunOptions, SystemConfig};

#[derive(Parser)]
#[command(name = "iso-cycles", version, about = "Crossing limit cycles of piecewise linear and cubic isochronous centers")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// System description (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for plots.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print a JSON report.
    #[arg(long)]
    json: bool,
    /// Window x0,x1,y0,y1.
    #[arg(long = "box", value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<[f64; 4]>,
    /// Residual tolerance for reported pairs.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Expanded fields and first integrals.
    Derive(Common),
    /// Closing polynomials, elimination and bounds.
    Close(Common),
    /// Crossing pairs (y1, y2).
    Solve(Common),
    /// Orbit checks for every pair.
    Verify(Common),
    /// SVG portrait and CSV samples under --out.
    Plot(Common),
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    parse_box(s).map_err(|e| e.to_string())
}

fn emit<T: Serialize + Display>(report: &T, json: bool) -> anyhow::Result<()> {
    let text = if json {
        serde_json::to_string_pretty(report).context("serializing report")? + "\n"
    } else {
        report.to_string()
    };
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing to stdout"),
        _ => Ok(()),
    }
}

fn run(command: Command) -> anyhow::Result<i32> {
    let common = match &command {
        Command::Derive(c) | Command::Close(c) | Command::Solve(c) | Command::Verify(c) | Command::Plot(c) => c,
    };
    let cfg = SystemConfig::load(&common.config).map_err(CliError::from)?;
    let opts = RunOptions { window: common.window, tol: common.tol };
    let json = common.json;
    let code = match &command {
        Command::Derive(_) => {
            emit(&cli::cmd_derive(&cfg)?, json)?;
            0
        }
        Command::Close(_) => {
            emit(&cli::cmd_close(&cfg)?, json)?;
            0
        }
        Command::Solve(_) => {
            let r = cli::cmd_solve(&cfg, &opts)?;
            emit(&r, json)?;
            r.exit_code()
        }
        Command::Verify(_) => {
            let r = cli::cmd_verify(&cfg, &opts)?;
            emit(&r, json)?;
            r.exit_code()
        }
        Command::Plot(c) => {
            emit(&cli::cmd_plot(&cfg, &opts, &c.out)?, json)?;
            0
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("ISO_CYCLES_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(args.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
