// SPDX-License-Identifier: MIT OR Apache-2.0

//! A user-defined piecewise-quadratic signal described in TOML.

use cpinfer::sim::{ExperimentConfig, RunOptions};

const EXPERIMENT: &str = r#"
kind = "performance"
reps = 100
seed = 3
alpha = 0.1
methods = ["DIF1-MAD", "DIF2-SD"]
noise = ["N1", "N2"]
sigma = 0.25

[signal]
kind = "custom"
n = 500
change_points = [150, 320]
# monomial coefficients in t / n, one list per segment
segments = [[0.0, 4.0], [1.2, 0.0, -3.0], [-2.0, 2.0]]
degree = 2
"#;

fn main() -> cpinfer::Result<()> {
    let cfg = ExperimentConfig::from_toml(EXPERIMENT)?;
    let signal = cfg.performance_spec()?.signal;
    for t in [1, 150, 151, 320, 321, 500] {
        println!("f({t}) = {:.3}", signal.value(t));
    }
    for report in cfg.run(RunOptions::default())? {
        print!("{}", report.to_table());
    }
    Ok(())
}
