// SPDX-License-Identifier: MIT OR Apache-2.0

//! Noise-scale estimates under independent and autoregressive noise.

use cpinfer::sim::{gen_noise, NoiseKind, NoiseSpec};
use cpinfer::{estimate_scale, ScaleMethod, TimeSeries};

fn main() -> cpinfer::Result<()> {
    let n = 20_000;
    println!("{:<5} {:>9} {:>9} {:>9} {:>9}", "noise", "sd", "mad", "dif", "lrv");
    for kind in NoiseKind::ALL {
        let spec = NoiseSpec::new(kind, 1.0, 3);
        let ts = TimeSeries::new(gen_noise(&spec, n)?)?;
        let sd = {
            let m = ts.values().iter().sum::<f64>() / n as f64;
            (ts.values().iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        let est = |m| estimate_scale(&ts, 0, m, None).map(|e| e.value);
        println!(
            "{:<5} {:>9.3} {:>9.3} {:>9.3} {:>9.3}   (long-run sd {:.3})",
            kind.to_string(),
            sd,
            est(ScaleMethod::Mad)?,
            est(ScaleMethod::Dif)?,
            est(ScaleMethod::Lrv)?,
            spec.long_run_sd()
        );
    }
    Ok(())
}
