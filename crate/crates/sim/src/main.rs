use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use wprelay::config::Config;
use wprelay::recipes::{run_experiment, ExperimentSpec, RECIPES};
use wprelay::verify::{verify, Level, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "wprelay",
    version,
    about = "Wireless-powered relay experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write its CSV.
    Run {
        /// One of fig4, fig5a, fig5b, fig6, fig7a, fig7b, fig8a, fig8b, fig9a, fig9b, custom.
        recipe: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to `<recipe>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the cross-check suite; exits nonzero if any check fails.
    Verify {
        #[arg(long, default_value = "quick")]
        level: Level,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scale the fourth bound constant by 1000 to exercise a failing check.
        #[arg(long)]
        corrupt_m4: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the recipe names.
    List,
}

fn load(config: Option<PathBuf>) -> anyhow::Result<Config> {
    match config {
        Some(p) => Config::load(&p).with_context(|| format!("loading {}", p.display())),
        None => Ok(Config::default()),
    }
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            recipe,
            trials,
            seed,
            out,
            config,
            workers,
        } => {
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{recipe}.csv")));
            let spec = ExperimentSpec {
                config: load(config)?,
                trials,
                seed,
                workers,
                out: Some(out.clone()),
                name: recipe,
            };
            let report = run_experiment(&spec)?;
            print!("{}", report.summary());
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            level,
            config,
            corrupt_m4,
            seed,
            workers,
        } => {
            let cfg = load(config)?;
            let defaults = VerifyOptions::default();
            let opts = VerifyOptions {
                level,
                corrupt_m4,
                seed: seed.or(cfg.seed).unwrap_or(defaults.seed),
                workers: workers.or(cfg.workers),
            };
            let report = verify(&cfg.scenario, &opts)?;
            print!("{}", report.to_text());
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::List => {
            for r in RECIPES {
                println!("{r}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
