use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use transonic::config::{RunConfig, RunMode};
use transonic::runner;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Background,
    Inflow,
    Full,
    Sweep,
    Verify,
}

impl From<Mode> for RunMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Background => RunMode::Background,
            Mode::Inflow => RunMode::Inflow,
            Mode::Full => RunMode::Full,
            Mode::Sweep => RunMode::Sweep,
            Mode::Verify => RunMode::Verify,
        }
    }
}

/// Transonic shock solutions in a cylindrical nozzle sector.
#[derive(Debug, Parser)]
#[command(name = "transonic", version)]
struct Args {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured mode.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output directory; overrides the configured one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplies grid sizes and mode counts.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    grid_scale: u32,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Also write the jump kernels of the last iterate.
    #[arg(long)]
    dump_kernels: bool,
}

fn load(args: &Args) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::parse(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    cfg = cfg.scaled(args.grid_scale as usize);
    if let Some(m) = args.mode {
        cfg.output.mode = m.into();
    }
    if let Some(o) = &args.out {
        cfg.output.dir = o.display().to_string();
    }
    if let Some(n) = args.max_iters {
        cfg.solver.max_iters = n;
    }
    cfg.output.dump_kernels |= args.dump_kernels;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> Result<bool> {
    let cfg = load(args)?;
    let out = runner::run(&cfg)?;
    let dir = PathBuf::from(&cfg.output.dir);
    out.write(&dir)?;
    print!("{}", out.report.to_toml());
    Ok(out.report.converged)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fixed point iteration did not converge");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
