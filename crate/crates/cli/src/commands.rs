use std::collections::hash_map::RandomState;
use std::fmt;
use std::fs::{self, File};
use std::hash::{BuildHasher, Hasher};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stable_lab::acceptance::{self, CriterionResult};
use stable_lab::charfn::{Drift, HaarAverages};
use stable_lab::matrix::{
    classify_support, empirical_cf_matrix, sample_y_m_batch, triangle_header, EnsembleSpec, HermitianMatrix,
};
use stable_lab::presets;
use stable_lab::stable::{SpectralMeasureEig, StabilityIndex};
use stable_lab::verify::rate::{
    cf_distances, curve_from_distances, default_s_grid, doubling_m_list, ExperimentConfig, DEFAULT_DIRECTIONS,
    SLOPE_WINDOW,
};
use stable_lab::verify::report::{Report, Table};
use stable_lab::Error;

use crate::{ClassifyArgs, EnsembleArgs, ExperimentArgs, Format, MeasureArgs, OutputArgs, SampleArgs, SelftestArgs};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or parameter values.
    Input(String),
    Runtime(String),
    /// The command ran but a verdict failed.
    Verdict(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verdict(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(s) => write!(f, "invalid input: {s}"),
            Failure::Runtime(s) => write!(f, "{s}"),
            Failure::Verdict(s) => write!(f, "failed: {s}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::OutOfRegime(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Echoed config of `sample`; feeding it back through `--config` reproduces
/// the output.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SampleConfig {
    ensemble: EnsembleSpec,
    n: usize,
    seed: u64,
}

fn entropy_seed() -> u64 {
    RandomState::new().build_hasher().finish()
}

fn read_measure(path: &Path) -> CliResult<SpectralMeasureEig> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn build_measure(args: &MeasureArgs) -> CliResult<SpectralMeasureEig> {
    let measure = match (&args.measure, &args.preset) {
        (Some(path), _) => read_measure(path)?,
        (None, Some(name)) => presets::by_name(name, args.dim, args.t)?,
        (None, None) => presets::orbital(args.t, args.dim)?,
    };
    if measure.dim() != args.dim {
        return Err(Failure::Input(format!(
            "measure has dimension {} but --N is {}",
            measure.dim(),
            args.dim
        )));
    }
    Ok(measure)
}

fn build_ensemble(args: &EnsembleArgs) -> CliResult<EnsembleSpec> {
    let alpha = args
        .alpha
        .ok_or_else(|| Failure::Input("--alpha is required without --config".into()))?;
    let alpha = StabilityIndex::new(alpha)?;
    let measure = build_measure(&args.measure)?;
    Ok(EnsembleSpec::new(args.measure.dim, alpha, measure, args.mu, args.m)?)
}

/// Reads a config JSON file, or the `config=` echo on the first line of a
/// previous CSV output.
fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let json = if text.starts_with('#') {
        let line = text.lines().next().unwrap_or_default();
        let at = line
            .find(" config=")
            .ok_or_else(|| Failure::Input(format!("{}: no config echo on the first line", path.display())))?;
        &line[at + " config=".len()..]
    } else {
        text.as_str()
    };
    serde_json::from_str(json).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(report: &Report, output: &OutputArgs) -> CliResult<()> {
    emit_to(report, output.format, output.out.as_deref())
}

fn emit_to(report: &Report, format: Format, out: Option<&Path>) -> CliResult<()> {
    let mut sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => report.write_csv(&mut sink)?,
        Format::Json => writeln!(sink, "{}", report.to_json()?)?,
    }
    sink.flush()?;
    Ok(())
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(entropy_seed)
}

/// Seed of the fresh `Y_m` samples for the `k`-th `m`, kept apart from the
/// Haar streams of `seed`.
fn sample_seed(seed: u64, k: usize) -> u64 {
    seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1))
}

pub fn sample(args: SampleArgs) -> CliResult<()> {
    let config = match &args.config {
        Some(path) => {
            let mut c: SampleConfig = read_config(path)?;
            c.ensemble.validate()?;
            if let Some(seed) = args.output.seed {
                c.seed = seed;
            }
            c
        }
        None => SampleConfig {
            ensemble: build_ensemble(&args.ensemble)?,
            n: args.n,
            seed: seed_or_entropy(args.output.seed),
        },
    };
    if config.n == 0 {
        return Err(Failure::Input("--n must be positive".into()));
    }
    let samples = sample_y_m_batch(&config.ensemble, config.n, config.seed);
    let header = triangle_header(config.ensemble.dim);
    let columns: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new("samples", &columns);
    for x in &samples {
        table.push(x.to_triangle().into_iter().map(Value::from).collect());
    }
    let mut report = Report::new("sample", config.seed, &config)?;
    report.tables.push(table);
    emit(&report, &args.output)
}

fn experiment_config(args: &ExperimentArgs, default_m: &[usize], with_zero: bool) -> CliResult<ExperimentConfig> {
    let config = match &args.config {
        Some(path) => {
            let mut c: ExperimentConfig = read_config(path)?;
            if let Some(seed) = args.output.seed {
                c.seed = seed;
            }
            c
        }
        None => {
            let ensemble = build_ensemble(&args.ensemble)?;
            let dim = ensemble.dim;
            let seed = seed_or_entropy(args.output.seed);
            let case = classify_support(&ensemble.measure);
            let mut s_grid = Vec::new();
            if with_zero {
                s_grid.push(HermitianMatrix::zeros(ensemble.dim));
            }
            s_grid.extend(default_s_grid(ensemble.dim, case.tag, &args.grid_radii, DEFAULT_DIRECTIONS, seed)?);
            ExperimentConfig {
                ensemble,
                m_list: args.m_list.clone().unwrap_or_else(|| default_m.to_vec()),
                s_grid,
                n_haar: args.n_haar.unwrap_or(default_n_haar(dim)),
                n_samples: if with_zero { args.n } else { 0 },
                seed,
            }
        }
    };
    config.validate()?;
    Ok(config)
}

fn default_n_haar(dim: usize) -> usize {
    if dim == 2 {
        100_000
    } else {
        10_000
    }
}

fn grid_table(config: &ExperimentConfig) -> Table {
    let header = triangle_header(config.ensemble.dim);
    let mut columns = vec!["s_index"];
    columns.extend(header.iter().map(String::as_str));
    let mut table = Table::new("s_grid", &columns);
    for (i, s) in config.s_grid.iter().enumerate() {
        let mut row = vec![json!(i)];
        row.extend(s.to_triangle().into_iter().map(Value::from));
        table.push(row);
    }
    table
}

pub fn cf_compare(args: ExperimentArgs) -> CliResult<()> {
    let config = experiment_config(&args, &[1, 4, 16, 64], true)?;
    if config.n_samples == 0 {
        return Err(Failure::Input("--n must be positive".into()));
    }
    let spec = &config.ensemble;
    let haar = config.haar_sample()?;
    let averages: Vec<HaarAverages> = config
        .s_grid
        .iter()
        .map(|s| HaarAverages::new(s, &spec.measure, spec.alpha, &haar))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(
        "cf",
        &[
            "s_index", "m", "re_cf_m", "im_cf_m", "se_cf_m", "re_cf_inf", "im_cf_inf", "se_cf_inf", "re_emp", "im_emp",
            "se_emp",
        ],
    );
    for (k, &m) in config.m_list.iter().enumerate() {
        let spec_m = EnsembleSpec { m, ..spec.clone() };
        let samples = sample_y_m_batch(&spec_m, config.n_samples, sample_seed(config.seed, k));
        for (i, (s, avg)) in config.s_grid.iter().zip(&averages).enumerate() {
            let analytic = avg.cf_m(m, Drift::Included);
            let limit = avg.cf_infinity();
            let emp = empirical_cf_matrix(&samples, s)?;
            table.push(vec![
                json!(i),
                json!(m),
                json!(analytic.value.re),
                json!(analytic.value.im),
                json!(analytic.std_error),
                json!(limit.value.re),
                json!(limit.value.im),
                json!(limit.std_error),
                json!(emp.value.re),
                json!(emp.value.im),
                json!(emp.std_error),
            ]);
        }
    }
    let mut report = Report::new("cf-compare", config.seed, &config)?;
    report.tables.push(grid_table(&config));
    report.tables.push(table);
    emit(&report, &args.output)
}

pub fn rate_fit(args: ExperimentArgs) -> CliResult<()> {
    let config = experiment_config(&args, &doubling_m_list(8, 512), false)?;
    let haar = config.haar_sample()?;
    let distances = cf_distances(&config, &haar, Drift::Included)?;
    let curve = curve_from_distances(config.m_list.clone(), distances)?;
    let mut report = Report::new("rate-fit", config.seed, &config)?;
    let mut table = Table::new("distances", &["m", "distance"]);
    for (m, d) in curve.m_values.iter().zip(&curve.distances) {
        table.push(vec![json!(m), json!(d)]);
    }
    let mut fit = Table::new("fit", &["slope", "slope_stderr", "intercept"]);
    fit.push(vec![json!(curve.slope), json!(curve.slope_stderr), json!(curve.intercept)]);
    report.tables.push(table);
    report.tables.push(fit);
    let ok = curve.slope_within(SLOPE_WINDOW.0, SLOPE_WINDOW.1);
    report.verdict(
        "slope_window",
        ok,
        format!("slope {:.4} in [{}, {}]", curve.slope, SLOPE_WINDOW.0, SLOPE_WINDOW.1),
    );
    emit(&report, &args.output)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("slope {:.4} outside {SLOPE_WINDOW:?}", curve.slope)))
    }
}

pub fn classify(args: ClassifyArgs) -> CliResult<()> {
    let measure = build_measure(&args.measure)?;
    let case = classify_support(&measure);
    let mut out = io::stdout().lock();
    match args.format {
        Format::Csv => {
            writeln!(out, "tag,N,span_dim,degenerate,matrix_dim")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                case.tag,
                case.dim,
                case.span_dim,
                case.degenerate,
                case.matrix_dim()
            )?;
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(&case).map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

pub fn selftest(args: SelftestArgs) -> CliResult<()> {
    let ids: Vec<u8> = if args.criterion.is_empty() {
        acceptance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        args.criterion.clone()
    };
    let mut results: Vec<CriterionResult> = Vec::new();
    let mut failed = Vec::new();
    for id in ids {
        let outcome = acceptance::run(id).ok_or_else(|| Failure::Input(format!("unknown criterion {id}")))?;
        match outcome {
            Ok(r) => {
                if args.format == Format::Csv {
                    println!("{r}");
                }
                if !r.passed {
                    failed.push(format!("{id} ({})", r.name));
                }
                results.push(r);
            }
            Err(e) => {
                if args.format == Format::Csv {
                    println!("criterion {id:>2} [FAIL] error: {e}");
                }
                failed.push(format!("{id} (error: {e})"));
            }
        }
    }
    if args.format == Format::Json {
        let text = serde_json::to_string_pretty(&results).map_err(|e| Failure::Runtime(e.to_string()))?;
        println!("{text}");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("criteria {}", failed.join(", "))))
    }
}
