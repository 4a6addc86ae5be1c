// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded Monte Carlo experiments.
//!
//! Replication `r` of cell `c` draws its noise from a ChaCha8 generator
//! seeded with [`replication_seed`]`(seed, c, r)`, where the cell id packs
//! the noise kind and series length as `code << 40 | n`. Every method and
//! degree in a cell sees the same noise path. Replications run in parallel
//! and are aggregated in replication order, so reports do not depend on the
//! number of workers.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::kernel::TimeSeries;
use crate::search::{detect, threshold_params, DetectionConfig};
use crate::sim::noise::{gen_noise_with, Ar1Variance, NoiseKind, NoiseSpec};
use crate::sim::signal::{gen_signal, SignalKind, SignalSpec};
use crate::thresholds::lambda_alpha;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CPINFER_THREADS";

/// The three method presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "DIF1-MAD", alias = "dif1-mad")]
    Dif1Mad,
    #[serde(rename = "DIF2-SD", alias = "dif2-sd")]
    Dif2Sd,
    #[serde(rename = "DIF2-LRV", alias = "dif2-lrv")]
    Dif2Lrv,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Dif1Mad, Method::Dif2Sd, Method::Dif2Lrv];

    pub fn config(self, degree: usize, alpha: f64) -> DetectionConfig {
        match self {
            Method::Dif1Mad => DetectionConfig::dif1_mad(degree),
            Method::Dif2Sd => DetectionConfig::dif2_sd(degree),
            Method::Dif2Lrv => DetectionConfig::dif2_lrv(degree),
        }
        .with_alpha(alpha)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Dif1Mad => "DIF1-MAD",
            Method::Dif2Sd => "DIF2-SD",
            Method::Dif2Lrv => "DIF2-LRV",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = CpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DIF1-MAD" => Ok(Method::Dif1Mad),
            "DIF2-SD" => Ok(Method::Dif2Sd),
            "DIF2-LRV" => Ok(Method::Dif2Lrv),
            _ => Err(CpError::param("method", format!("unknown method `{s}`"))),
        }
    }
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` in cell `cell`.
pub fn replication_seed(root: u64, cell: u64, rep: u64) -> u64 {
    mix(mix(mix(root) ^ cell) ^ rep)
}

fn cell_id(noise: NoiseKind, n: usize) -> u64 {
    noise.code() << 40 | n as u64
}

/// Worker-count control for experiment runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// `None` reads [`THREADS_ENV`], falling back to all cores.
    pub threads: Option<usize>,
}

impl RunOptions {
    fn resolved_threads(&self) -> usize {
        self.threads
            .or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok())
            .filter(|&t| t > 0)
            .unwrap_or(0)
    }
}

fn run_reps<T, F>(reps: usize, opts: RunOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.resolved_threads())
        .build()
        .map_err(|e| CpError::Config(format!("thread pool: {e}")))?;
    pool.install(|| (0..reps).into_par_iter().map(f).collect())
}

/// Pure-noise experiment settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageSpec {
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub noise: Vec<NoiseKind>,
    pub degrees: Vec<usize>,
    pub seed: u64,
    #[serde(default)]
    pub ar1_variance: Ar1Variance,
    /// Replace every method's threshold by this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_override: Option<f64>,
}

/// Signal-plus-noise experiment settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceSpec {
    pub signal: SignalSpec,
    pub sigma: f64,
    /// Noise levels that differ from `sigma` for particular noise kinds.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sigma_by_noise: BTreeMap<NoiseKind, f64>,
    pub alpha: f64,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub noise: Vec<NoiseKind>,
    /// Tested degree; defaults to the signal's degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub ar1_variance: Ar1Variance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_override: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Coverage,
    Performance,
}

/// One aggregated table row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    pub noise: NoiseKind,
    pub degree: usize,
    pub n: usize,
    pub sigma: f64,
    pub reps: usize,
    /// Fraction of replications whose intervals all contain a change point
    /// (an empty list counts as covered).
    pub coverage: f64,
    /// Mean number of intervals containing a change point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_genuine: Option<f64>,
    /// Mean share of genuine intervals, 1 for empty lists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop_genuine: Option<f64>,
    /// Mean interval width over replications with at least one interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_length: Option<f64>,
    pub mean_intervals: f64,
    /// Replications with no interval.
    pub empty: usize,
    /// Replications with at least one interval, all genuine.
    pub covered_nonempty: usize,
}

impl ReportRow {
    /// Share of replications with output in which every interval is genuine.
    pub fn coverage_given_detection(&self) -> Option<f64> {
        let nonempty = self.reps - self.empty;
        (nonempty > 0).then(|| self.covered_nonempty as f64 / nonempty as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub reps: usize,
    pub seed: u64,
    pub seed_scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalKind>,
    pub change_points: Vec<usize>,
    pub config: serde_json::Value,
    pub rows: Vec<ReportRow>,
}

const SEED_SCHEME: &str = "chacha8(splitmix(splitmix(splitmix(seed) ^ (noise_code << 40 | n)) ^ rep))";

impl ExperimentReport {
    pub fn row(&self, method: Method, noise: NoiseKind, degree: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.noise == noise && r.degree == degree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Rows as CSV with the table columns.
    pub fn to_csv(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(String::new, |x| format!("{x}"))
        }
        let mut out = String::from(
            "method,noise,degree,n,sigma,reps,coverage,no_genuine,prop_genuine,mean_length,mean_intervals,empty\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.method,
                r.noise,
                r.degree,
                r.n,
                r.sigma,
                r.reps,
                r.coverage,
                opt(r.no_genuine),
                opt(r.prop_genuine),
                opt(r.mean_length),
                r.mean_intervals,
                r.empty
            ));
        }
        out
    }

    /// Fixed-width table for terminals.
    pub fn to_table(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(|| "-".into(), |x| format!("{x:.2}"))
        }
        let mut out = format!(
            "{:<9} {:<5} {:>3} {:>6} {:>6} {:>9} {:>9} {:>9} {:>8}\n",
            "method", "noise", "p", "n", "sigma", "coverage", "genuine", "prop", "length"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<9} {:<5} {:>3} {:>6} {:>6} {:>9.3} {:>9} {:>9} {:>8}\n",
                r.method.to_string(),
                r.noise.to_string(),
                r.degree,
                r.n,
                r.sigma,
                r.coverage,
                opt(r.no_genuine),
                opt(r.prop_genuine),
                opt(r.mean_length)
            ));
        }
        out
    }
}

fn check_common(reps: usize, methods: &[Method], noise: &[NoiseKind]) -> Result<()> {
    if reps == 0 {
        return Err(CpError::param("reps", "must be at least 1"));
    }
    if methods.is_empty() || noise.is_empty() {
        return Err(CpError::Config("need at least one method and one noise kind".into()));
    }
    Ok(())
}

/// Resolves the threshold once per configuration instead of per replication.
fn prepared(method: Method, degree: usize, alpha: f64, n: usize, lambda: Option<f64>) -> Result<DetectionConfig> {
    let mut cfg = method.config(degree, alpha);
    cfg.validate()?;
    cfg.lambda_override = match lambda {
        Some(l) => Some(l),
        None => Some(lambda_alpha(&threshold_params(&cfg, n))?.lambda_alpha),
    };
    Ok(cfg)
}

fn noise_path(
    kind: NoiseKind,
    sigma: f64,
    ar1_variance: Ar1Variance,
    root: u64,
    n: usize,
    rep: usize,
) -> Vec<f64> {
    let seed = replication_seed(root, cell_id(kind, n), rep as u64);
    let spec = NoiseSpec {
        ar1_variance,
        ..NoiseSpec::new(kind, sigma, seed)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_noise_with(&spec, n, &mut rng)
}

/// Fraction of pure-noise replications with no detection, per
/// (method, noise, degree).
pub fn coverage_experiment(spec: &CoverageSpec, opts: RunOptions) -> Result<ExperimentReport> {
    check_common(spec.reps, &spec.methods, &spec.noise)?;
    if spec.degrees.is_empty() {
        return Err(CpError::Config("need at least one degree".into()));
    }
    let mut configs = Vec::new();
    for &m in &spec.methods {
        for &p in &spec.degrees {
            configs.push((m, p, prepared(m, p, spec.alpha, spec.n, spec.lambda_override)?));
        }
    }

    let mut rows = Vec::new();
    for &kind in &spec.noise {
        let empties: Vec<Vec<bool>> = run_reps(spec.reps, opts, |rep| {
            let y = noise_path(kind, 1.0, spec.ar1_variance, spec.seed, spec.n, rep);
            let ts = TimeSeries::new(y)?;
            configs
                .iter()
                .map(|(_, _, cfg)| Ok(detect(&ts, cfg)?.intervals.is_empty()))
                .collect()
        })?;
        for (i, &(method, degree, _)) in configs.iter().enumerate() {
            let empty = empties.iter().filter(|e| e[i]).count();
            rows.push(ReportRow {
                method,
                noise: kind,
                degree,
                n: spec.n,
                sigma: 1.0,
                reps: spec.reps,
                coverage: empty as f64 / spec.reps as f64,
                no_genuine: None,
                prop_genuine: None,
                mean_length: None,
                mean_intervals: 0.0,
                empty,
                covered_nonempty: 0,
            });
        }
    }
    Ok(ExperimentReport {
        kind: ExperimentKind::Coverage,
        reps: spec.reps,
        seed: spec.seed,
        seed_scheme: SEED_SCHEME.into(),
        signal: Some(SignalKind::None),
        change_points: Vec::new(),
        config: serde_json::to_value(spec).expect("spec serialises"),
        rows,
    })
}

#[derive(Clone, Copy, Debug, Default)]
struct RepMetrics {
    intervals: usize,
    genuine: usize,
    total_width: usize,
}

/// Detection metrics on a known signal, per (method, noise).
pub fn performance_experiment(spec: &PerformanceSpec, opts: RunOptions) -> Result<ExperimentReport> {
    check_common(spec.reps, &spec.methods, &spec.noise)?;
    for s in std::iter::once(&spec.sigma).chain(spec.sigma_by_noise.values()) {
        if !(s.is_finite() && *s > 0.0) {
            return Err(CpError::param("sigma", format!("must be positive, got {s}")));
        }
    }
    let mean = gen_signal(&spec.signal)?;
    let n = spec.signal.n;
    let degree = spec.degree.unwrap_or(spec.signal.degree);
    let etas = &spec.signal.change_points;
    let configs = spec
        .methods
        .iter()
        .map(|&m| Ok((m, prepared(m, degree, spec.alpha, n, spec.lambda_override)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for &kind in &spec.noise {
        let sigma = spec.sigma_by_noise.get(&kind).copied().unwrap_or(spec.sigma);
        let per_rep: Vec<Vec<RepMetrics>> = run_reps(spec.reps, opts, |rep| {
            let noise = noise_path(kind, sigma, spec.ar1_variance, spec.seed, n, rep);
            let y: Vec<f64> = mean.values().iter().zip(noise).map(|(f, z)| f + z).collect();
            let ts = TimeSeries::new(y)?;
            configs
                .iter()
                .map(|(_, cfg)| {
                    let res = detect(&ts, cfg)?;
                    let genuine = res
                        .intervals
                        .iter()
                        .filter(|iv| etas.iter().any(|&eta| iv.contains(eta)))
                        .count();
                    Ok(RepMetrics {
                        intervals: res.intervals.len(),
                        genuine,
                        total_width: res.intervals.iter().map(|iv| iv.width).sum(),
                    })
                })
                .collect()
        })?;
        for (i, &(method, _)) in configs.iter().enumerate() {
            let (mut covered, mut empty, mut covered_nonempty) = (0usize, 0usize, 0usize);
            let (mut genuine, mut prop, mut length, mut count) = (0.0, 0.0, 0.0, 0.0);
            for m in per_rep.iter().map(|r| r[i]) {
                genuine += m.genuine as f64;
                count += m.intervals as f64;
                if m.intervals == 0 {
                    empty += 1;
                    covered += 1;
                    prop += 1.0;
                    continue;
                }
                prop += m.genuine as f64 / m.intervals as f64;
                length += m.total_width as f64 / m.intervals as f64;
                if m.genuine == m.intervals {
                    covered += 1;
                    covered_nonempty += 1;
                }
            }
            let reps = spec.reps as f64;
            let nonempty = spec.reps - empty;
            rows.push(ReportRow {
                method,
                noise: kind,
                degree,
                n,
                sigma,
                reps: spec.reps,
                coverage: covered as f64 / reps,
                no_genuine: Some(genuine / reps),
                prop_genuine: Some(prop / reps),
                mean_length: (nonempty > 0).then(|| length / nonempty as f64),
                mean_intervals: count / reps,
                empty,
                covered_nonempty,
            });
        }
    }
    Ok(ExperimentReport {
        kind: ExperimentKind::Performance,
        reps: spec.reps,
        seed: spec.seed,
        seed_scheme: SEED_SCHEME.into(),
        signal: Some(spec.signal.kind),
        change_points: etas.clone(),
        config: serde_json::to_value(spec).expect("spec serialises"),
        rows,
    })
}
