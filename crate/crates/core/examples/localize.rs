// SPDX-License-Identifier: MIT OR Apache-2.0

//! Locating a kink inside an interval with piecewise-linear fits.

use cpinfer::sim::{gen_noise, NoiseKind, NoiseSpec};
use cpinfer::{best_split, poly_fit_rss, TimeSeries};

fn main() -> cpinfer::Result<()> {
    let n = 300;
    let noise = gen_noise(&NoiseSpec::new(NoiseKind::N1, 0.3, 5), n)?;
    let y: Vec<f64> = (1..=n)
        .zip(noise)
        .map(|(t, z)| {
            let x = t as f64 / n as f64;
            let mean = if t <= 170 { 4.0 * x } else { 4.0 * 170.0 / n as f64 - 6.0 * (x - 170.0 / n as f64) };
            mean + z
        })
        .collect();
    let ts = TimeSeries::new(y)?;

    let single = poly_fit_rss(&ts, 120, 220, 1)?;
    println!("one line on [120, 220]: rss = {:.2}", single.rss);

    let split = best_split(&ts, 120, 220, 1)?;
    println!("best split after t = {} (true kink after 170), rss = {:.2}", split.eta, split.rss.unwrap_or(f64::NAN));
    println!("left  piece: {:.3} + {:.3} x", split.left[0], split.left[1]);
    println!("right piece: {:.3} + {:.3} x", split.right[0], split.right[1]);
    Ok(())
}
