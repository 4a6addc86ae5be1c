// SPDX-License-Identifier: MIT OR Apache-2.0

//! Detection metrics on the built-in test signals.
//!
//! cargo run --release --example performance [-- blocks|waves|hills [reps]]

use cpinfer::cli::{preset_config, Preset};
use cpinfer::sim::RunOptions;

fn main() -> cpinfer::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = match args.next().as_deref() {
        None | Some("blocks") => Preset::Blocks,
        Some("waves") => Preset::Waves,
        Some("hills") => Preset::Hills,
        Some(other) => {
            eprintln!("unknown signal `{other}`");
            std::process::exit(2);
        }
    };
    let mut cfg = preset_config(preset);
    cfg.reps = args.next().and_then(|r| r.parse().ok()).unwrap_or(100);
    for report in cfg.run(RunOptions::default())? {
        println!("change points: {:?}", report.change_points);
        print!("{}", report.to_table());
    }
    Ok(())
}
