//! `stabilis` command-line driver.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stabilis::event_log::RareLevelUnit;
use stabilis::experiment::{Approach, StrategyKind};

use crate::config::{parse_alpha_grid, AlphaGrid, RunConfig};

#[derive(Parser)]
#[command(name = "stabilis", version, about = "Outcome prediction with temporal-stability evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label, enrich, split and truncate a raw CSV log.
    Prep(Common),
    /// Search, train, calibrate and evaluate the configured approaches.
    Run(Common),
    /// Turn run reports into plot-ready CSV tables.
    Report(Common),
    /// Print the automatic truncation length for a raw log.
    SuggestTruncation(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw CSV log (overrides `log`).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated approach names, e.g. `XGB_agg,RF_idx_mul`.
    #[arg(long, value_delimiter = ',')]
    approach: Option<Vec<Approach>>,
    /// auc_1run, auc_5run or combined_5run.
    #[arg(long)]
    strategy: Option<StrategyKind>,
    /// Comma-separated smoothing weights, e.g. `0.1,0.5,0.9`.
    #[arg(long, value_parser = parse_alpha_grid)]
    alpha_grid: Option<AlphaGrid>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Count rare-level support per `case` or per `event`.
    #[arg(long)]
    rare_level_unit: Option<RareLevelUnit>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(log) = &self.log {
            config.log = Some(log.clone());
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(approaches) = &self.approach {
            config.approaches = approaches.clone();
        }
        if let Some(strategy) = self.strategy {
            config.strategy = strategy;
        }
        if let Some(grid) = &self.alpha_grid {
            config.alpha_grid = grid.0.clone();
        }
        if let Some(unit) = self.rare_level_unit {
            config.rare_level_unit = unit;
        }
        Ok(config)
    }
}

fn execute(cli: Cli) -> anyhow::Result<ExitCode> {
    let common = match &cli.command {
        Command::Prep(c) | Command::Run(c) | Command::Report(c) | Command::SuggestTruncation(c) => c,
    };
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global()?;
    }
    let config = common.resolve()?;
    match cli.command {
        Command::Prep(_) => {
            let stats = commands::prep(&config)?;
            println!(
                "traces {} | pos class ratio {:.3} | median length {} | max length {} | trunc length {} | events {}",
                stats.n_traces,
                stats.pos_class_ratio,
                stats.median_length,
                stats.max_length,
                stats.trunc_length,
                stats.n_events
            );
        }
        Command::Run(_) => {
            let failed = commands::run(&config)?;
            if failed > 0 {
                eprintln!("error: {failed} approach(es) failed; see manifest.json");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Report(_) => {
            for path in commands::report(&config.output_dir)? {
                println!("{}", path.display());
            }
        }
        Command::SuggestTruncation(_) => println!("{}", commands::suggest_truncation(&config)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STABILIS_LOG_LEVEL", "warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
