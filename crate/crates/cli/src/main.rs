use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use stratlearn::engine::{simulate, GameSource, SimulationConfig};
use stratlearn::nash::spectral_radius_at_ne;
use stratlearn::{solve_zero_sum, MatrixGame};
use stratlearn_cli::{parse_config, render_csv, run_preset, Document, NamedSeries, PresetName, PresetOptions};

#[derive(Parser)]
#[command(name = "stratlearn", version, about = "Online learning against strategic adversaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration or preset document.
    Run {
        config: PathBuf,
        /// Worker threads for preset documents.
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Run a built-in experiment grid.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        seeds: Vec<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Keep every `stride`-th round in the CSV (plus the first and last).
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Print the equilibrium of a payoff matrix as JSON.
    Solve { matrix: PathBuf },
    /// Print the spectral radius of the AMWU dynamics at the equilibrium.
    Certify {
        matrix: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        alpha: f64,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config, jobs } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            match parse_config(&text)? {
                Document::Config(c) => run_single(&c),
                Document::Preset(p) => {
                    let options = PresetOptions { horizon: p.horizon, stride: p.stride, parallelism: jobs };
                    preset(p.preset, &p.output, &p.seeds, &options)
                }
            }
        }
        Command::Preset { name, out, seeds, horizon, stride, jobs } => {
            let name: PresetName = name.parse()?;
            preset(name, &out, &seeds, &PresetOptions { horizon, stride, parallelism: jobs })
        }
        Command::Solve { matrix } => {
            let game = MatrixGame::load_csv(&matrix).with_context(|| format!("loading {}", matrix.display()))?;
            let ne = solve_zero_sum(&game)?;
            println!("{}", serde_json::to_string_pretty(&ne)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { matrix, eta, alpha } => {
            let game = MatrixGame::load_csv(&matrix).with_context(|| format!("loading {}", matrix.display()))?;
            let ne = solve_zero_sum(&game)?;
            println!("{}", spectral_radius_at_ne(&game, &ne, eta, alpha)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn preset(name: PresetName, out: &Path, seeds: &[u64], options: &PresetOptions) -> anyhow::Result<ExitCode> {
    let manifest = run_preset(name, out, seeds, options)?;
    for f in &manifest.failures {
        eprintln!("run {} (seed {}) failed: {}", f.id, f.seed, f.error);
    }
    Ok(if manifest.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run_single(config: &SimulationConfig) -> anyhow::Result<ExitCode> {
    let output = simulate(config, None)?;
    let seed = match config.game {
        GameSource::Random { seed, .. } => seed,
        GameSource::Csv(_) => 0,
    };
    let series: Vec<NamedSeries> = output
        .series
        .iter()
        .map(|s| NamedSeries::from_values(config.agent.kind.name(), s.metric.name(), seed, config.adversary.eta(), &s.values, 1))
        .collect();
    let csv = render_csv(&series);
    if !output.scaling.is_identity() {
        eprintln!("payoffs rescaled to losses by (a - {}) * {}", output.scaling.offset, output.scaling.scale);
    }
    match &config.output {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            let meta = serde_json::json!({
                "config": config,
                "scaling": output.scaling,
                "library_version": stratlearn::VERSION,
            });
            let meta_path = path.with_extension("json");
            std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")
                .with_context(|| format!("writing {}", meta_path.display()))?;
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
