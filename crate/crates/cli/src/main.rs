use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use nrelay_cli::config::{ExperimentConfig, ExperimentKind, HarnessError};
use nrelay_cli::output::write_outputs;
use nrelay_cli::preset::{preset, PRESET_NAMES};
use nrelay_cli::run::run_experiment;
use nrelay_cli::validate;

/// Analytic and Monte-Carlo performance curves for multihop relay chains
/// over cascaded Rayleigh fading.
#[derive(Parser)]
#[command(name = "nrelay", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fading-amplitude density curves.
    Pdf(RunArgs),
    /// Outage probability vs average SNR.
    Outage(RunArgs),
    /// Amount of fading vs cascade order.
    Af(RunArgs),
    /// Outage under optimized vs equal power allocation.
    Pa(RunArgs),
    /// Run the built-in invariant checks.
    Validate,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named experiment bundle (fig1..fig5); runs its configs matching this
    /// subcommand.
    #[arg(long)]
    preset: Option<String>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's Monte-Carlo trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Pdf(a) => run(ExperimentKind::Pdf, a),
        Cmd::Outage(a) => run(ExperimentKind::Outage, a),
        Cmd::Af(a) => run(ExperimentKind::Af, a),
        Cmd::Pa(a) => run(ExperimentKind::Pa, a),
        Cmd::Validate => return run_validate(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_configs(kind: ExperimentKind, args: &RunArgs) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let mut configs = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = nrelay_cli::parse_config(&text)?;
            if cfg.experiment != kind {
                return Err(HarnessError::Validation(format!(
                    "config is a {} experiment, but the {} subcommand was invoked",
                    cfg.experiment.name(),
                    kind.name()
                )));
            }
            vec![cfg]
        }
        (None, Some(name)) => {
            let all = preset(name).ok_or_else(|| {
                HarnessError::Validation(format!(
                    "unknown preset {name:?}; available: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            let matching: Vec<_> = all.into_iter().filter(|c| c.experiment == kind).collect();
            if matching.is_empty() {
                return Err(HarnessError::Validation(format!(
                    "preset {name:?} has no {} experiments",
                    kind.name()
                )));
            }
            matching
        }
        _ => {
            return Err(HarnessError::Validation(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    for cfg in configs.iter_mut() {
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = args.trials {
            cfg.trials = trials;
        }
        cfg.validate()?;
    }
    Ok(configs)
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<(), HarnessError> {
    let configs = load_configs(kind, &args)?;
    for cfg in &configs {
        let start = Instant::now();
        let curves = run_experiment(cfg)?;
        let written = write_outputs(&args.out, cfg, &curves, start.elapsed())?;
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run_validate() -> ExitCode {
    let results = validate::run_all();
    let mut failures = 0;
    for r in &results {
        if r.passed {
            println!("PASS {}", r.name);
        } else {
            println!("FAIL {} — {}", r.name, r.detail);
            failures += 1;
        }
    }
    println!("{} checks, {} failed", results.len(), failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
