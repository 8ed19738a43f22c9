use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use compgap_cli::config::ConfigError;
use compgap_cli::output::{render_csv, summarize, write_report};
use compgap_cli::{parse_config, run, CliError, Experiment, ExperimentConfig};

/// Runs the security-game and formula-sampling experiments.
#[derive(Parser)]
#[command(name = "compgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trial count; overrides `run.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Output directory; overrides `run.out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Base vs signature-wrapped risk on shared seeds.
    Risk,
    /// Adversarial risk of one attacker against the base problem.
    AdvRisk,
    /// Bounded vs unbounded attackers against the wrapped problem.
    Separation,
    /// Zero-risk construction with repeated signatures.
    C3,
    /// Emit CNF formulas for the adversarial-example search and solve them.
    NpForge,
    /// Cross-check the closed-form adversarial risk.
    OracleCheck,
    /// Print a table of an existing results.csv.
    Report,
}

fn experiment(c: Command) -> Option<Experiment> {
    Some(match c {
        Command::Risk => Experiment::Risk,
        Command::AdvRisk => Experiment::AdvRisk,
        Command::Separation => Experiment::Separation,
        Command::C3 => Experiment::C3,
        Command::NpForge => Experiment::NpForge,
        Command::OracleCheck => Experiment::OracleCheck,
        Command::Report => return None,
    })
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = Some(t);
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("COMPGAP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError::new(format!("COMPGAP_THREADS must be a positive integer (got {v:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(ConfigError::new(e.to_string())))
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = load(&cli)?;
    match experiment(cli.command) {
        None => {
            let csv = std::fs::read_to_string(cfg.out.join("results.csv"))?;
            print!("{}", summarize(&csv)?);
        }
        Some(e) => {
            let report = run(e, &cfg)?;
            write_report(&cfg.out, &cfg, &report)?;
            print!("{}", summarize(&render_csv(&cfg, &report))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("compgap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
