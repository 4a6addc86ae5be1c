// SPDX-License-Identifier: MIT OR Apache-2.0

//! Threshold constants across series lengths, degrees and grid decays.

use cpinfer::thresholds::threshold_report;
use cpinfer::{search::threshold_params, DetectionConfig, NoiseMode};

fn main() -> cpinfer::Result<()> {
    println!("{:>6} {:>9} {:>5} {:>4} {:>3} {:>9} {:>9} {:>8}", "n", "mode", "a", "W", "p", "H", "H(up)", "lambda");
    for mode in [NoiseMode::Gaussian, NoiseMode::Dependent] {
        for n in [500, 5_000, 50_000] {
            for decay in [std::f64::consts::SQRT_2, 2.0] {
                for p in 0..=2 {
                    let mut cfg = DetectionConfig::dif1_mad(p);
                    cfg.mode = mode;
                    cfg.decay = decay;
                    let params = threshold_params(&cfg, n);
                    let r = threshold_report(&params)?;
                    let (h, h_up) = match mode {
                        NoiseMode::Gaussian => (r.h11, r.h12),
                        NoiseMode::Dependent => (r.h21, r.h22),
                    };
                    println!(
                        "{:>6} {:>9} {:>5.3} {:>4} {:>3} {:>9.4} {:>9.4} {:>8.4}",
                        n, mode.to_string(), decay, params.min_scale, p, h, h_up, r.lambda_alpha
                    );
                }
            }
        }
    }
    Ok(())
}
