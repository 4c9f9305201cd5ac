use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crossover::experiment::{self, Experiment, Overrides, RunConfig};
use crossover::lattice::Boundary;

/// Anisotropic bond percolation experiments.
///
/// Settings come from an optional TOML file; flags override it. When no seed
/// is given anywhere, CROSSOVER_SEED is used.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Microcanonical q-sweeps and their canonical curves over a p-grid.
    Sweep(Common),
    /// Critical curve q_c(p) from wrapping-probability crossings.
    EstimateQc(Common),
    /// q_c over a p-grid plus the psi and gamma fits.
    FitPsi(Common),
    /// chi_d, the q_c lower bound, the series bound and certificates.
    BoundsTable(Common),
    /// Recompute the exact golden suite and diff it against the stored one.
    OracleCheck(OracleArgs),
    /// Renormalization certificates over (p, q, epsilon, alpha).
    Certify(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Free,
    Periodic,
}

#[derive(Args, Default)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Write into this directory instead of <output_dir>/<experiment>/<timestamp>-<seed>.
    #[arg(long)]
    run_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    side_d: Option<usize>,
    #[arg(long)]
    side_s: Option<usize>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Comma-separated p values.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Golden file (defaults to the suite built into the library).
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Write the recomputed suite to --golden.
    #[arg(long)]
    regenerate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common, golden, regenerate) = match cli.command {
        Command::Sweep(c) => (Experiment::Sweep, c, None, false),
        Command::EstimateQc(c) => (Experiment::EstimateQc, c, None, false),
        Command::FitPsi(c) => (Experiment::FitPsi, c, None, false),
        Command::BoundsTable(c) => (Experiment::BoundsTable, c, None, false),
        Command::Certify(c) => (Experiment::Certify, c, None, false),
        Command::OracleCheck(o) => (Experiment::OracleCheck, o.common, o.golden, o.regenerate),
    };
    match run(experiment, common, golden, regenerate) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(experiment: Experiment, c: Common, golden: Option<PathBuf>, regenerate: bool) -> crossover::Result<ExitCode> {
    let mut config = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(experiment),
    };
    config.experiment = experiment;
    Overrides {
        seed: c.seed,
        replicates: c.replicates,
        output_dir: c.output_dir,
        threads: c.threads,
        d: c.d,
        s: c.s,
        side_d: c.side_d,
        side_s: c.side_s,
        boundary: c.boundary.map(|b| match b {
            BoundaryArg::Free => Boundary::Free,
            BoundaryArg::Periodic => Boundary::Periodic,
        }),
        p: c.p,
        q: c.q,
        epsilon: c.epsilon,
        alpha: c.alpha,
        golden,
        regenerate,
    }
    .apply(&mut config);
    let summary = experiment::run(config, c.run_dir)?;
    println!("{}", summary.run_dir.display());
    eprintln!(
        "seed {} | {} records | {:.2}s",
        summary.manifest.master_seed,
        summary.output.records.len(),
        summary.manifest.wall_seconds
    );
    match summary.output.deferred_error {
        Some(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(e.exit_code() as u8))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}
