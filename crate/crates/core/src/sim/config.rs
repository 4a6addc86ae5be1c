// SPDX-License-Identifier: MIT OR Apache-2.0

//! Declarative experiment files.
//!
//! ```toml
//! kind = "performance"        # or "coverage"
//! reps = 500
//! seed = 1
//! alpha = 0.1
//! methods = ["DIF1-MAD", "DIF2-LRV"]
//! noise = ["N1", "N3"]
//! # ar1_variance = "stationary"
//! # lambda = 4.5              # fixed threshold for every method
//!
//! # coverage only
//! # n = [750]                 # one length or a list
//! # degrees = [0, 1, 2]
//!
//! # performance only
//! sigma = 10.0
//! sigma_by_noise = { N3 = 5.0, N4 = 5.0 }
//! [signal]
//! kind = "blocks"             # blocks | waves | hills | custom
//! # amplitude = 20.0          # waves
//! # height = 2.5              # hills
//! # n, change_points, segments, degree: waves/hills/custom overrides
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::sim::experiment::{
    coverage_experiment, performance_experiment, CoverageSpec, ExperimentReport, Method,
    PerformanceSpec, RunOptions,
};
use crate::sim::noise::{Ar1Variance, NoiseKind};
use crate::sim::signal::{hills_defaults, waves_defaults, SignalKind, SignalSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lengths {
    One(usize),
    Many(Vec<usize>),
}

impl Lengths {
    fn to_vec(&self) -> Vec<usize> {
        match self {
            Lengths::One(n) => vec![*n],
            Lengths::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub kind: Option<SignalKind>,
    pub n: Option<usize>,
    pub change_points: Option<Vec<usize>>,
    pub amplitude: Option<f64>,
    pub height: Option<f64>,
    pub segments: Option<Vec<Vec<f64>>>,
    pub degree: Option<usize>,
}

impl SignalConfig {
    pub fn build(&self) -> Result<SignalSpec> {
        let kind = self
            .kind
            .ok_or_else(|| CpError::Config("signal.kind is required".into()))?;
        match kind {
            SignalKind::None => Ok(SignalSpec::none(self.n.ok_or_else(|| {
                CpError::Config("signal.n is required for kind none".into())
            })?)),
            SignalKind::Blocks => Ok(SignalSpec::blocks()),
            SignalKind::Waves => {
                let d = waves_defaults();
                SignalSpec::waves_with(
                    self.n.unwrap_or(d.n),
                    self.change_points.clone().unwrap_or(d.change_points),
                    self.amplitude.unwrap_or(d.amplitude),
                )
            }
            SignalKind::Hills => {
                let d = hills_defaults();
                SignalSpec::hills_with(
                    self.n.unwrap_or(d.n),
                    self.change_points.clone().unwrap_or(d.change_points),
                    self.height.unwrap_or(d.height),
                )
            }
            SignalKind::Custom => {
                let missing = |f: &str| CpError::Config(format!("custom signal needs `{f}`"));
                let segments = self.segments.clone().ok_or_else(|| missing("segments"))?;
                let degree = self
                    .degree
                    .unwrap_or_else(|| segments.iter().map(Vec::len).max().unwrap_or(1) - 1);
                SignalSpec::custom(
                    self.n.ok_or_else(|| missing("n"))?,
                    self.change_points.clone().unwrap_or_default(),
                    segments,
                    degree,
                )
            }
        }
    }
}

fn default_alpha() -> f64 {
    0.1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Coverage,
    Performance,
}

/// Contents of an experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ConfigKind,
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub noise: Vec<NoiseKind>,
    #[serde(default)]
    pub ar1_variance: Ar1Variance,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub n: Option<Lengths>,
    #[serde(default)]
    pub degrees: Option<Vec<usize>>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub sigma_by_noise: BTreeMap<NoiseKind, f64>,
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub signal: Option<SignalConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CpError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CpError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    /// One coverage spec per series length.
    pub fn coverage_specs(&self) -> Result<Vec<CoverageSpec>> {
        let n = self
            .n
            .as_ref()
            .ok_or_else(|| CpError::Config("coverage experiments need `n`".into()))?;
        Ok(n.to_vec()
            .into_iter()
            .map(|n| CoverageSpec {
                n,
                alpha: self.alpha,
                reps: self.reps,
                methods: self.methods.clone(),
                noise: self.noise.clone(),
                degrees: self.degrees.clone().unwrap_or_else(|| vec![0, 1, 2]),
                seed: self.seed,
                ar1_variance: self.ar1_variance,
                lambda_override: self.lambda,
            })
            .collect())
    }

    pub fn performance_spec(&self) -> Result<PerformanceSpec> {
        let signal = self
            .signal
            .as_ref()
            .ok_or_else(|| CpError::Config("performance experiments need a [signal] table".into()))?
            .build()?;
        Ok(PerformanceSpec {
            signal,
            sigma: self
                .sigma
                .ok_or_else(|| CpError::Config("performance experiments need `sigma`".into()))?,
            sigma_by_noise: self.sigma_by_noise.clone(),
            alpha: self.alpha,
            reps: self.reps,
            methods: self.methods.clone(),
            noise: self.noise.clone(),
            degree: self.degree,
            seed: self.seed,
            ar1_variance: self.ar1_variance,
            lambda_override: self.lambda,
        })
    }

    /// Runs the experiment; coverage files with several lengths return one
    /// report per length.
    pub fn run(&self, opts: RunOptions) -> Result<Vec<ExperimentReport>> {
        match self.kind {
            ConfigKind::Coverage => self
                .coverage_specs()?
                .iter()
                .map(|s| coverage_experiment(s, opts))
                .collect(),
            ConfigKind::Performance => Ok(vec![performance_experiment(
                &self.performance_spec()?,
                opts,
            )?]),
        }
    }
}
