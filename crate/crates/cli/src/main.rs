//! `stable-lab`: sample invariant stable matrix ensembles, compare their
//! characteristic functions, fit convergence rates and run the acceptance
//! suite.
//!
//! Exit codes: 0 pass, 1 runtime failure, 2 invalid input, 3 failed verdict.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "stable-lab", version, about = "Unitarily invariant stable Hermitian random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw samples of Y_m and write them as upper-triangle rows.
    Sample(SampleArgs),
    /// Tabulate analytic cf_m, the stable-limit CF and the empirical CF over a grid.
    CfCompare(ExperimentArgs),
    /// Fit the log-log slope of |cf_m − cf_∞| against m.
    RateFit(ExperimentArgs),
    /// Print the support classification of a spectral measure.
    Classify(ClassifyArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
struct MeasureArgs {
    /// Matrix dimension.
    #[arg(long = "N", value_name = "N", default_value_t = 2)]
    dim: usize,
    /// Named spectral measure: orbital, full-basis, traceless-pair, identity-line, axis.
    #[arg(long, conflicts_with = "measure")]
    preset: Option<String>,
    /// Mixing parameter of the orbital preset.
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    /// Spectral measure as JSON: {"N": .., "atoms": [[..]], "weights": [..]}.
    #[arg(long, value_name = "FILE")]
    measure: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[group(id = "ensemble", multiple = true)]
struct EnsembleArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Stability index in (0, 2].
    #[arg(long)]
    alpha: Option<f64>,
    /// Identity shift.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Number of summands.
    #[arg(long, default_value_t = 1)]
    m: usize,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Master seed; drawn from entropy when absent and echoed in the output.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Rerun from a config JSON file or a previous CSV output.
    #[arg(long, value_name = "FILE", conflicts_with = "ensemble")]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct ExperimentArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Summand counts, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    /// Radii of the random test-matrix grid.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.0")]
    grid_radii: Vec<f64>,
    /// Haar unitaries used for the analytic averages [default: 100000 for N = 2, 10000 otherwise].
    #[arg(long)]
    n_haar: Option<usize>,
    /// Fresh Y_m samples per m for the empirical CF (cf-compare only).
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Rerun from a config JSON file or a previous CSV output.
    #[arg(long, value_name = "FILE", conflicts_with = "ensemble")]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct ClassifyArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct SelftestArgs {
    /// Run only these criteria (1-10); all when absent.
    #[arg(long, value_delimiter = ',')]
    criterion: Vec<u8>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn configure_threads() -> Result<(), commands::Failure> {
    let Ok(raw) = std::env::var("STABLE_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| commands::Failure::Input(format!("STABLE_LAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| commands::Failure::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::CfCompare(a) => commands::cf_compare(a),
        Command::RateFit(a) => commands::rate_fit(a),
        Command::Classify(a) => commands::classify(a),
        Command::Selftest(a) => commands::selftest(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stable-lab: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
