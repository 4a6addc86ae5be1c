// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `cpinfer` command line.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CpError, Result};
use crate::io::{ingest_csv, write_plot_data, ColumnSelector};
use crate::kernel::TimeSeries;
use crate::scale::ScaleMethod;
use crate::search::{detect, threshold_params, DetectionConfig, DetectionResult, Selection};
use crate::sim::{
    gen_noise_with, ExperimentConfig, ExperimentReport, NoiseKind, NoiseSpec, RunOptions,
};
use crate::thresholds::{threshold_report, NoiseMode};

#[derive(Debug, Parser)]
#[command(name = "cpinfer", version, about = "Change-point inference with family-wise error control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect intervals that contain change points.
    Detect(DetectArgs),
    /// Run a Monte Carlo experiment from a config file or a preset.
    Simulate(SimulateArgs),
    /// Print the constants behind a threshold.
    Thresholds(ThresholdArgs),
    /// Time detection on synthetic noise.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(alias = "gaussian")]
    Gauss,
    #[value(alias = "dependent")]
    Dep,
}

impl From<ModeArg> for NoiseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Gauss => NoiseMode::Gaussian,
            ModeArg::Dep => NoiseMode::Dependent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Mad,
    #[value(alias = "sd")]
    Dif,
    Lrv,
}

impl From<EstimatorArg> for ScaleMethod {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Mad => ScaleMethod::Mad,
            EstimatorArg::Dif => ScaleMethod::Dif,
            EstimatorArg::Lrv => ScaleMethod::Lrv,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    #[default]
    First,
    Argmax,
}

/// Method settings shared by `detect` and `thresholds`.
#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Polynomial degree of the pieces.
    #[arg(long, short = 'p', default_value_t = 0)]
    pub degree: usize,
    /// Family-wise error level.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Grid decay `a`.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub decay: f64,
    /// Minimum scale `W` [default: floor(ln n), or floor(sqrt(n) / 2) in dep mode].
    #[arg(long)]
    pub min_scale: Option<usize>,
    #[arg(long, value_enum, default_value = "gauss")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Delimited text file with one observation per row.
    #[arg(long, short = 'i')]
    pub input: PathBuf,
    /// Column position (0-based) or header name.
    #[arg(long, short = 'c')]
    pub column: Option<String>,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Noise-scale estimator [default: mad in gauss mode, lrv in dep mode].
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    /// Block size of the long-run estimator [default: floor(n^(1/3))].
    #[arg(long)]
    pub lrv_block: Option<usize>,
    /// Known noise scale, skipping estimation.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "first")]
    pub selection: SelectionArg,
    #[arg(long, short = 'f', value_enum, default_value = "json")]
    pub format: Format,
    /// Also write `t,y,interval_id,eta_flag` rows to this file.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Accepted for interface symmetry; detection is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Pure noise, n = 750, all methods, N1 to N4, degrees 0 to 2.
    Coverage,
    /// Blocks at sigma = 10 (5 for the autoregressive noise kinds).
    Blocks,
    /// Waves at sigma = 5.
    Waves,
    /// Hills at sigma = 1.
    Hills,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment file (TOML).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Override the replication count.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override the root seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: $CPINFER_THREADS or all cores].
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short = 'f', value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Series length.
    #[arg(long, short = 'n')]
    pub n: usize,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Series lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize << 16, 1 << 18])]
    pub sizes: Vec<usize>,
    #[arg(long, short = 'p', default_value_t = 0)]
    pub degree: usize,
    /// Timed runs per size; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// One timed size in a benchmark.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub grid_size: usize,
    pub evaluations: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub degree: usize,
    pub rows: Vec<BenchRow>,
    /// Time of the largest size over the smallest.
    pub time_ratio: f64,
}

/// Error payload printed on failure.
#[derive(Debug, Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

/// JSON object describing a failure.
pub fn error_json(kind: &str, message: impl Into<String>) -> String {
    serde_json::to_string(&ErrorJson {
        error: ErrorBody {
            kind,
            message: message.into(),
        },
    })
    .expect("error serialises")
}

impl DetectArgs {
    pub fn config(&self) -> Result<DetectionConfig> {
        let mode: NoiseMode = self.method.mode.into();
        let estimator = self.estimator.map(ScaleMethod::from).unwrap_or(match mode {
            NoiseMode::Gaussian => ScaleMethod::Mad,
            NoiseMode::Dependent => ScaleMethod::Lrv,
        });
        let cfg = DetectionConfig {
            degree: self.method.degree,
            alpha: self.method.alpha,
            decay: self.method.decay,
            min_scale: self.method.min_scale,
            mode,
            estimator,
            lrv_block: self.lrv_block,
            selection: match self.selection {
                SelectionArg::First => Selection::FirstExceedance,
                SelectionArg::Argmax => Selection::ScaleArgmax,
            },
            known_scale: self.sigma,
            lambda_override: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn render_detection(result: &DetectionResult, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(result).expect("result serialises"),
        Format::Csv => {
            let mut out = String::from("start,end,width,stat,eta_hat,midpoint_fallback\n");
            for iv in &result.intervals {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    iv.start, iv.end, iv.width, iv.stat, iv.eta_hat, iv.midpoint_fallback
                ));
            }
            out
        }
        Format::Human => {
            let mut out = format!(
                "n = {}  mode = {}  scale = {:.4} ({})  lambda = {:.4}  threshold = {:.4}\n",
                result.n, result.mode, result.sigma_hat, result.estimator, result.lambda, result.threshold
            );
            if result.intervals.is_empty() {
                out.push_str("no intervals\n");
            }
            for (k, iv) in result.intervals.iter().enumerate() {
                out.push_str(&format!(
                    "{:>3}  [{}, {}]  width {}  |D| = {:.3}  eta = {}{}\n",
                    k + 1,
                    iv.start,
                    iv.end,
                    iv.width,
                    iv.stat,
                    iv.eta_hat,
                    if iv.midpoint_fallback { " (midpoint)" } else { "" }
                ));
            }
            out
        }
    }
}

pub fn run_detect(args: &DetectArgs) -> Result<String> {
    let cfg = args.config()?;
    let column = args
        .column
        .as_deref()
        .map(|c| c.parse().expect("infallible"))
        .unwrap_or(ColumnSelector::First);
    let ts = ingest_csv(&args.input, &column)?;
    let result = detect(&ts, &cfg)?;
    if let Some(path) = &args.plot_data {
        write_plot_data(path, &ts, &result)?;
    }
    Ok(render_detection(&result, args.format))
}

fn preset_toml(preset: Preset) -> &'static str {
    match preset {
        Preset::Coverage => {
            "kind = \"coverage\"\nreps = 500\nn = 750\nmethods = [\"DIF1-MAD\", \"DIF2-SD\", \"DIF2-LRV\"]\nnoise = [\"N1\", \"N2\", \"N3\", \"N4\"]\ndegrees = [0, 1, 2]\n"
        }
        Preset::Blocks => {
            "kind = \"performance\"\nreps = 500\nsigma = 10.0\nsigma_by_noise = { N3 = 5.0, N4 = 5.0 }\nmethods = [\"DIF1-MAD\", \"DIF2-SD\", \"DIF2-LRV\"]\nnoise = [\"N1\", \"N2\", \"N3\", \"N4\"]\n[signal]\nkind = \"blocks\"\n"
        }
        Preset::Waves => {
            "kind = \"performance\"\nreps = 500\nsigma = 5.0\nmethods = [\"DIF1-MAD\", \"DIF2-SD\", \"DIF2-LRV\"]\nnoise = [\"N1\", \"N2\", \"N3\", \"N4\"]\n[signal]\nkind = \"waves\"\n"
        }
        Preset::Hills => {
            "kind = \"performance\"\nreps = 500\nsigma = 1.0\nmethods = [\"DIF1-MAD\", \"DIF2-SD\", \"DIF2-LRV\"]\nnoise = [\"N1\", \"N2\", \"N3\", \"N4\"]\n[signal]\nkind = \"hills\"\n"
        }
    }
}

/// Experiment file contents for a preset.
pub fn preset_config(preset: Preset) -> ExperimentConfig {
    ExperimentConfig::from_toml(preset_toml(preset)).expect("preset parses")
}

fn render_reports(reports: &[ExperimentReport], format: Format) -> String {
    match format {
        Format::Json if reports.len() == 1 => reports[0].to_json(),
        Format::Json => serde_json::to_string_pretty(reports).expect("reports serialise"),
        Format::Csv => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                let csv = r.to_csv();
                out.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |x| x.1) });
            }
            out
        }
        Format::Human => reports.iter().map(ExperimentReport::to_table).collect(),
    }
}

pub fn run_simulate(args: &SimulateArgs) -> Result<String> {
    let mut cfg = match (&args.config, args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => preset_config(p),
        (None, None) => {
            return Err(CpError::Config("simulate needs --config or --preset".into()))
        }
    };
    if let Some(r) = args.reps {
        cfg.reps = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let reports = cfg.run(RunOptions {
        threads: args.threads,
    })?;
    Ok(render_reports(&reports, args.format))
}

pub fn run_thresholds(args: &ThresholdArgs) -> Result<String> {
    let cfg = DetectionConfig {
        degree: args.method.degree,
        alpha: args.method.alpha,
        decay: args.method.decay,
        min_scale: args.method.min_scale,
        mode: args.method.mode.into(),
        ..DetectionConfig::default()
    };
    let report = threshold_report(&threshold_params(&cfg, args.n))?;
    Ok(serde_json::to_string_pretty(&report).expect("report serialises"))
}

/// Times detection (Gaussian mode, MAD scale) on iid Gaussian noise.
pub fn bench(args: &BenchArgs) -> Result<BenchReport> {
    if args.sizes.is_empty() {
        return Err(CpError::Config("bench needs at least one size".into()));
    }
    let cfg = DetectionConfig::dif1_mad(args.degree);
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ n as u64);
        let noise = gen_noise_with(&NoiseSpec::new(NoiseKind::N1, 1.0, 0), n, &mut rng);
        let ts = TimeSeries::new(noise)?;
        let mut best = f64::INFINITY;
        let mut last = None;
        for _ in 0..args.repeats.max(1) {
            let started = Instant::now();
            let res = detect(&ts, &cfg)?;
            best = best.min(started.elapsed().as_secs_f64());
            last = Some(res);
        }
        let res = last.expect("at least one run");
        rows.push(BenchRow {
            n,
            grid_size: res.grid_size,
            evaluations: res.evaluations,
            seconds: best,
        });
    }
    let time_ratio = rows.last().expect("rows").seconds / rows[0].seconds;
    Ok(BenchReport {
        degree: args.degree,
        rows,
        time_ratio,
    })
}

pub fn run_bench(args: &BenchArgs) -> Result<String> {
    Ok(serde_json::to_string_pretty(&bench(args)?).expect("report serialises"))
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Detect(a) => run_detect(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Thresholds(a) => run_thresholds(a),
        Command::Bench(a) => run_bench(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Results go to `out`; failures are printed to `err` as JSON.
pub fn main_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(err, "{}", error_json("usage", e.to_string().trim_end()));
            return 2;
        }
    };
    match run(&cli) {
        Ok(text) => {
            let _ = write!(out, "{text}");
            if !text.ends_with('\n') {
                let _ = writeln!(out);
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(e.kind(), e.to_string()));
            1
        }
    }
}
