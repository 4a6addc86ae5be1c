// SPDX-License-Identifier: MIT OR Apache-2.0

//! Timing of the grid search as the series grows.
//!
//! cargo run --release --example bench

use cpinfer::cli::{bench, BenchArgs};

fn main() -> cpinfer::Result<()> {
    for degree in 0..=2 {
        let report = bench(&BenchArgs {
            sizes: vec![1 << 14, 1 << 16, 1 << 18, 1 << 20],
            degree,
            repeats: 3,
            seed: 1,
        })?;
        println!("p = {degree}");
        for row in &report.rows {
            println!(
                "  n = {:>8}  grid = {:>10}  evaluated = {:>10}  {:>8.3} ms",
                row.n,
                row.grid_size,
                row.evaluations,
                row.seconds * 1e3
            );
        }
    }
    Ok(())
}
