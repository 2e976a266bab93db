//! `brownflow`: eigenvalue samples, analytic Brown-measure tables,
//! empirical-vs-analytic comparisons and Hamilton-Jacobi characteristic runs.
//!
//! Exit codes: 0 success, 1 a comparison failed, 2 usage/config/I-O error,
//! 3 numeric failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::preset::Preset;
use config::{CheckName, CommandName, DensityName, Ensemble, Format, HjTask, Params, RunConfig, SEED_ENV};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "brownflow", version, about = "Brown measures of circular and free multiplicative Brownian motion")]
struct Cli {
    /// JSON run config (`{"version": 1, ...}`); command-line values take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed. Precedence: this flag, then BROWNFLOW_SEED, then the config file, then 42.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalue point cloud (columns re, im).
    Sample {
        #[arg(value_enum)]
        ensemble: Option<Ensemble>,
        #[command(flatten)]
        params: Params,
    },
    /// Analytic density table.
    Density {
        #[arg(value_enum)]
        density: Option<DensityName>,
        #[command(flatten)]
        params: Params,
    },
    /// Empirical vs analytic distances with pass/fail.
    Compare {
        #[arg(value_enum)]
        check: Option<CheckName>,
        #[command(flatten)]
        params: Params,
    },
    /// Characteristics, lifetime scans and shooting.
    Hj {
        #[arg(value_enum)]
        task: Option<HjTask>,
        #[command(flatten)]
        params: Params,
    },
    /// Named run with pinned parameters; flags override them.
    Preset {
        #[arg(value_enum)]
        name: Preset,
        #[command(flatten)]
        params: Params,
    },
    /// Run the command named in the config file.
    Run {
        #[command(flatten)]
        params: Params,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::empty(),
    };
    let params = match &cli.command {
        Command::Sample { ensemble, params } => {
            cfg.command = Some(CommandName::Sample);
            cfg.ensemble = ensemble.or(cfg.ensemble);
            params
        }
        Command::Density { density, params } => {
            cfg.command = Some(CommandName::Density);
            cfg.density = density.or(cfg.density);
            params
        }
        Command::Compare { check, params } => {
            cfg.command = Some(CommandName::Compare);
            cfg.check = check.or(cfg.check);
            params
        }
        Command::Hj { task, params } => {
            cfg.command = Some(CommandName::Hj);
            cfg.task = task.or(cfg.task);
            params
        }
        Command::Preset { name, params } => {
            cfg.apply(&name.config());
            params
        }
        Command::Run { params } => {
            if cfg.command.is_none() {
                return Err(CliError::Usage("`run` needs --config with a `command` field".into()));
            }
            params
        }
    };
    cfg.apply_params(params);
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    if cli.format.is_some() {
        cfg.format = cli.format;
    }
    let env = std::env::var(SEED_ENV).ok();
    cfg.resolve_seed(cli.seed, env.as_deref())?;
    cfg.format = Some(cfg.format());
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = resolve(cli)?;
    let wtplots = cfg.preset.as_deref() == Some(&Preset::FigWtplots.name());
    let (out, failed) = match cfg.command.expect("resolved") {
        CommandName::Sample => (commands::sample::run(&mut cfg)?, 0),
        CommandName::Density if wtplots => (commands::preset::wtplots(&mut cfg)?, 0),
        CommandName::Density => (commands::density::run(&mut cfg)?, 0),
        CommandName::Compare => commands::compare::run(&mut cfg)?,
        CommandName::Hj => (commands::hj::run(&mut cfg)?, 0),
    };
    out.emit(&cfg)?;
    if failed > 0 {
        return Err(CliError::CompareFailed {
            failed,
            total: out.rows.len(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("brownflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
