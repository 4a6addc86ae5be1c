// SPDX-License-Identifier: MIT OR Apache-2.0

//! Null coverage: share of pure-noise replications with no interval.
//!
//! cargo run --release --example coverage [-- reps]

use cpinfer::sim::{coverage_experiment, Ar1Variance, CoverageSpec, Method, NoiseKind, RunOptions};

fn main() -> cpinfer::Result<()> {
    let reps = std::env::args().nth(1).and_then(|r| r.parse().ok()).unwrap_or(200);
    let spec = CoverageSpec {
        n: 750,
        alpha: 0.1,
        reps,
        methods: Method::ALL.to_vec(),
        noise: NoiseKind::ALL.to_vec(),
        degrees: vec![0, 1, 2],
        seed: 1,
        ar1_variance: Ar1Variance::Inflated,
        lambda_override: None,
    };
    let report = coverage_experiment(&spec, RunOptions::default())?;
    print!("{}", report.to_table());
    Ok(())
}
