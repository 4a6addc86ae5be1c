// SPDX-License-Identifier: MIT OR Apache-2.0

//! Detects level shifts in a CSV column and writes plot data.
//!
//! cargo run --example detect_csv [-- path/to/file.csv column]

use cpinfer::io::{ingest_csv, write_plot_data, ColumnSelector};
use cpinfer::{detect, DetectionConfig};

fn main() -> cpinfer::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/steps.csv").into());
    let column: ColumnSelector = args.next().as_deref().unwrap_or("value").parse().unwrap();

    let ts = ingest_csv(&path, &column)?;
    let result = detect(&ts, &DetectionConfig::dif1_mad(0))?;
    println!(
        "n = {}  sigma = {:.3}  lambda = {:.3}  grid = {} windows, {} evaluated",
        result.n, result.sigma_hat, result.lambda, result.grid_size, result.evaluations
    );
    for iv in &result.intervals {
        println!("[{:>4}, {:>4}]  |D| = {:>6.2}  change after {}", iv.start, iv.end, iv.stat, iv.eta_hat);
    }

    let plot = std::env::temp_dir().join("cpinfer_steps_plot.csv");
    write_plot_data(&plot, &ts, &result)?;
    println!("plot data: {}", plot.display());
    Ok(())
}
