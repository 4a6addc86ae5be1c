// SPDX-License-Identifier: MIT OR Apache-2.0

//! Test signals, noise processes and Monte Carlo experiments.

pub mod config;
pub mod experiment;
pub mod noise;
pub mod signal;

pub use config::{ExperimentConfig, SignalConfig};
pub use experiment::{
    coverage_experiment, performance_experiment, replication_seed, CoverageSpec,
    ExperimentKind, ExperimentReport, Method, PerformanceSpec, ReportRow, RunOptions,
    THREADS_ENV,
};
pub use noise::{gen_noise, gen_noise_with, Ar1Variance, NoiseKind, NoiseSpec, BURN_IN};
pub use signal::{gen_signal, hills_defaults, waves_defaults, SignalKind, SignalSpec};
