use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use swarm_naming::batch::{expand, run_batch};
use swarm_naming::config::parse_sweep;
use swarm_naming::summarize::{summarize, SummarizeOptions};
use swarm_naming::{Error, RunConfig};

/// Foraging swarm that plays the minimal naming game.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration with one seed.
    Simulate {
        /// TOML config file; omitted keys take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a grid of configurations over many seeds.
    Batch {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of seeds; runs use seeds base..base+n where base is the
        /// config's `seed`.
        #[arg(long)]
        seeds: u64,
        /// `key=v1,v2,...`; repeat for a cartesian product.
        #[arg(long)]
        sweep: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (defaults to the available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Aggregate a batch directory into summary CSV files.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Bin width of time series, seconds.
        #[arg(long, default_value_t = 100.0)]
        bin_s: f64,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let mut cfg = load_config(config.as_ref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let (cells, specs) = expand(&cfg, &[cfg.seed], &[])?;
            let summaries = run_batch(&cells, &specs, &out, 1)?;
            let s = &summaries[0];
            if let Some(e) = &s.error {
                anyhow::bail!("run {} failed: {e}", s.run_id);
            }
            println!(
                "{} {} t_end={} events={}",
                s.run_id,
                s.status,
                s.t_end.unwrap_or(0.0),
                s.events.unwrap_or(0)
            );
        }
        Command::Batch {
            config,
            seeds,
            sweep,
            out,
            jobs,
        } => {
            let cfg = load_config(config.as_ref())?;
            let sweeps = sweep
                .iter()
                .map(|s| parse_sweep(s))
                .collect::<Result<Vec<_>, _>>()?;
            let seed_list: Vec<u64> = (0..seeds).map(|i| cfg.seed + i).collect();
            let (cells, specs) = expand(&cfg, &seed_list, &sweeps)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let summaries = run_batch(&cells, &specs, &out, jobs)?;
            let failed = summaries.iter().filter(|s| s.status == "error").count();
            println!("{} runs, {} failed", summaries.len(), failed);
            for s in summaries.iter().filter(|s| s.status == "error") {
                eprintln!("{}: {}", s.run_id, s.error.as_deref().unwrap_or(""));
            }
        }
        Command::Summarize { input, out, bin_s } => {
            let opts = SummarizeOptions {
                origin_bin_s: bin_s,
                interaction_bin_s: bin_s,
            };
            summarize(&input, &out, &opts).with_context(|| format!("summarizing {}", input.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
