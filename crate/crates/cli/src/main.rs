//! `multipole`: batch runner for the expansion, coefficient, model, Fock
//! and multipole verification suites.

mod commands;
mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{Section, Status};
use config::{RunConfig, Theorem};
use output::obj;

#[derive(Parser, Debug)]
#[command(name = "multipole", version, about = "Verification suites for corrections to the stochastic limit")]
struct Cli {
    /// TOML configuration; defaults are used for every missing section.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON and CSV outputs (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON summary instead of text lines.
    #[arg(long, global = true)]
    json: bool,
    /// Override `tolerances.agreement`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence rates of the oscillatory-integral expansions.
    Expansion {
        #[arg(long, value_enum)]
        theorem: Option<TheoremArg>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Noise coefficients of the configured profile with route cross-checks.
    Coeffs,
    /// Vacuum expectations of the configured models.
    Model,
    /// Indefinite-metric Fock space checks.
    Fock,
    /// Multipole pairings by Richardson extraction.
    Multipole,
    /// Every suite.
    All,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum TheoremArg {
    Fullline,
    Simplex,
    Halfline,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Fullline => Theorem::Fullline,
            TheoremArg::Simplex => Theorem::Simplex,
            TheoremArg::Halfline => Theorem::Halfline,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::parse(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = cli.tol {
        cfg.tolerances.agreement = t;
    }
    if let Some(dir) = &cli.out {
        cfg.output.dir = Some(dir.clone());
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write_outputs(dir: &Path, sections: &[Section], summary: &Value) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for s in sections {
        fs::write(dir.join(format!("{}.json", s.name)), output::render(&s.json))?;
        for (name, text) in &s.files {
            fs::write(dir.join(name), text)?;
        }
    }
    fs::write(dir.join("summary.json"), output::render(summary))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(Status::ConfigError.exit_code());
        }
    };
    if cli.dump_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    let sections = match cli.command {
        Command::Expansion { theorem, order } => vec![commands::expansion(&cfg, theorem.map(Into::into), order)],
        Command::Coeffs => vec![commands::coeffs(&cfg)],
        Command::Model => vec![commands::model(&cfg)],
        Command::Fock => vec![commands::fock(&cfg)],
        Command::Multipole => vec![commands::multipole(&cfg)],
        Command::All => vec![
            commands::expansion(&cfg, None, None),
            commands::coeffs(&cfg),
            commands::model(&cfg),
            commands::fock(&cfg),
            commands::multipole(&cfg),
        ],
    };
    let status = sections.iter().map(|s| s.status).max().unwrap_or(Status::Pass);
    let summary = obj([
        (
            "sections",
            Value::Array(
                sections
                    .iter()
                    .map(|s| obj([("name", Value::String(s.name.clone())), ("status", Value::String(s.status.label().into()))]))
                    .collect(),
            ),
        ),
        ("status", Value::String(status.label().into())),
        ("exit_code", Value::from(status.exit_code())),
    ]);
    if let Some(dir) = &cfg.output.dir {
        if let Err(e) = write_outputs(dir, &sections, &summary) {
            eprintln!("cannot write outputs to {}: {e}", dir.display());
            return ExitCode::from(Status::ConfigError.exit_code());
        }
    }
    if cli.json {
        print!("{}", output::render(&summary));
    } else {
        for s in &sections {
            for line in &s.lines {
                println!("{line}");
            }
        }
        println!("{:<16} overall", status.label());
    }
    ExitCode::from(status.exit_code())
}
