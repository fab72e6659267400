mod commands;
mod error;
mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use metriclat_core::MetricTable;

use crate::commands::Outcome;
use crate::error::CliError;
use crate::input::{load_lattice, load_metric, read_json, LatticeSpec, Loaded, MetricSource, MetricSpec};

/// Metric irreducibility on finite lattices.
#[derive(Debug, Parser)]
#[command(name = "metriclat", version)]
struct Cli {
    /// Print JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the law checks.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the lattice axioms and distributivity.
    Validate { lattice: PathBuf },
    /// Run every law checker that applies to the metric.
    Check { lattice: PathBuf, metric: PathBuf },
    /// Per-element join- and d-irreducibility.
    Analyze { lattice: PathBuf, metric: PathBuf },
    /// An inclusion-minimal R-base and the distances of the irreducibles to it.
    Bases {
        lattice: PathBuf,
        metric: PathBuf,
        /// Radius, an integer or "p/q".
        #[arg(long = "r", default_value = "0")]
        radius: String,
    },
    /// Compare the subset puzzle criterion with brute force (kappa = identity).
    Puzzle { lattice: PathBuf },
    /// Randomized cross-checks on a seeded corpus.
    Crosscheck {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn lattice(path: &Path) -> Result<Loaded, CliError> {
    load_lattice(&read_json::<LatticeSpec>(path)?)
}

fn with_metric(lattice_path: &Path, metric_path: &Path) -> Result<(Loaded, MetricTable, MetricSource), CliError> {
    let lat = lattice(lattice_path)?;
    let spec: MetricSpec = read_json(metric_path)?;
    let (d, source) = load_metric(&lat, &spec)?;
    Ok((lat, d, source))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate { lattice: path } => Ok(commands::validate(&lattice(path)?)),
        Command::Check { lattice, metric } => {
            let (lat, d, source) = with_metric(lattice, metric)?;
            Ok(commands::check(&lat, &d, &source))
        }
        Command::Analyze { lattice, metric } => {
            let (lat, d, source) = with_metric(lattice, metric)?;
            commands::analyze(&lat, &d, &source)
        }
        Command::Bases { lattice, metric, radius } => {
            let radius = commands::parse_radius(radius)?;
            let (lat, d, source) = with_metric(lattice, metric)?;
            Ok(commands::bases(&lat, &d, &source, &radius))
        }
        Command::Puzzle { lattice: path } => commands::puzzle(&lattice(path)?),
        Command::Crosscheck { count } => commands::crosscheck(cli.seed, *count),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("values serialize"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
