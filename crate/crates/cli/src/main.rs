//! `zn-lab`: runs Z_N gauge theory experiments from key=value configs.
//!
//! Exit status is 0 on success, 1 when the model rejects the run and 2
//! when the configuration itself is wrong.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zn_gauge::io::{parse_config, run, Command, Origin, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "zn-lab", version, about = "Z_N lattice gauge theory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Lowest levels of the gauge (or dual clock) Hamiltonian
    Spectrum(Common),
    /// Gap above the N² topological multiplet along a λ₁ sweep
    Gap(Common),
    /// Charge–vortex braiding phase, algebraic and from the state vector
    Braid(Common),
    /// Gauge spectrum versus the union of twisted clock-model sectors
    DualityCheck(Common),
    /// Isospectrality of the model with static random plaquette couplings
    RgcCheck(Common),
    /// Mean-field free energy curves and the first-order point
    MftScan(Common),
    /// Replica-symmetric stationary point at one parameter set
    RmftSolve(Common),
    /// Replica-symmetric phase diagram on a grid
    RmftPhaseDiagram(Common),
}

#[derive(Args)]
struct Common {
    /// key=value config file; settings given on the command line win
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(short, long)]
    out: Option<String>,
    /// json, csv or golden
    #[arg(short, long)]
    format: Option<String>,
    /// Settings as key=value
    settings: Vec<String>,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Spectrum(c) => (Command::Spectrum, c),
            Sub::Gap(c) => (Command::Gap, c),
            Sub::Braid(c) => (Command::Braid, c),
            Sub::DualityCheck(c) => (Command::DualityCheck, c),
            Sub::RgcCheck(c) => (Command::RgcCheck, c),
            Sub::MftScan(c) => (Command::MftScan, c),
            Sub::RmftSolve(c) => (Command::RmftSolve, c),
            Sub::RmftPhaseDiagram(c) => (Command::RmftPhaseDiagram, c),
        }
    }
}

fn resolve(command: Command, args: &Common) -> Result<RunConfig, RunError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            parse_config(&text).map_err(|e| {
                RunError::Config(zn_gauge::io::ConfigError::new(
                    e.origin,
                    format!("{}: {}", path.display(), e.message),
                ))
            })?
        }
        None => RunConfig::default(),
    };
    cfg.command = command;
    cfg.apply_tokens(args.settings.iter().map(String::as_str), Origin::Argument)?;
    if let Some(f) = &args.format {
        cfg.set("format", f, Origin::Argument)?;
    }
    if let Some(o) = &args.out {
        cfg.set("out", o, Origin::Argument)?;
    }
    Ok(cfg)
}

fn execute(command: Command, args: &Common) -> Result<(), RunError> {
    let cfg = resolve(command, args)?;
    let output = run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            for p in output.write(path.as_ref())? {
                eprintln!("wrote {p}");
            }
        }
        None => print!("{}", output.primary()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    match execute(command, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zn-lab {}: {e}", command.as_str());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
