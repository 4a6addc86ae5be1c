// SPDX-License-Identifier: MIT OR Apache-2.0

//! Noise-free piecewise-polynomial test signals.

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::kernel::TimeSeries;

const DEFAULTS: &str = include_str!("../../data/signals.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    None,
    Blocks,
    Waves,
    Hills,
    Custom,
}

impl std::fmt::Display for SignalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignalKind::None => "none",
            SignalKind::Blocks => "blocks",
            SignalKind::Waves => "waves",
            SignalKind::Hills => "hills",
            SignalKind::Custom => "custom",
        })
    }
}

/// A piecewise polynomial mean on `{1, ..., n}`.
///
/// Segment `k` covers `change_points[k-1] <= t < change_points[k]` (with
/// `1` and `n + 1` as the outer limits) and evaluates
/// `sum_i segments[k][i] * (t / n)^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub n: usize,
    pub change_points: Vec<usize>,
    pub segments: Vec<Vec<f64>>,
    pub degree: usize,
}

#[derive(Debug, Deserialize)]
struct Defaults {
    waves: WavesDefaults,
    hills: HillsDefaults,
}

/// Shipped coefficients for the sawtooth signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavesDefaults {
    pub n: usize,
    pub change_points: Vec<usize>,
    pub amplitude: f64,
}

/// Shipped coefficients for the bumps signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HillsDefaults {
    pub n: usize,
    pub change_points: Vec<usize>,
    pub height: f64,
}

fn defaults() -> Defaults {
    toml::from_str(DEFAULTS).expect("bundled signal defaults parse")
}

pub fn waves_defaults() -> WavesDefaults {
    defaults().waves
}

pub fn hills_defaults() -> HillsDefaults {
    defaults().hills
}

const BLOCKS_FULL_N: usize = 2048;
const BLOCKS_N: usize = 512;
const BLOCKS_SD: f64 = 7.0;
const BLOCKS_POS: [f64; 11] = [
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81,
];
const BLOCKS_JUMP: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];

/// The standard blocks function sampled at `t / 2048`, scaled to a sample
/// standard deviation of 7, and truncated to its first 512 values.
fn blocks_values() -> Vec<f64> {
    let raw: Vec<f64> = (1..=BLOCKS_FULL_N)
        .map(|t| {
            let x = t as f64 / BLOCKS_FULL_N as f64;
            BLOCKS_POS
                .iter()
                .zip(BLOCKS_JUMP)
                .filter(|(&p, _)| x > p)
                .map(|(_, h)| h)
                .sum()
        })
        .collect();
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    raw.into_iter()
        .take(BLOCKS_N)
        .map(|v| v * BLOCKS_SD / sd)
        .collect()
}

/// Monomial coefficients in `x = t / n` of `c0 + c1 (t - t0) + c2 (t - t0)^2`.
fn shift_to_global(local: [f64; 3], t0: f64, n: f64) -> Vec<f64> {
    let [c0, c1, c2] = local;
    vec![
        c0 - c1 * t0 + c2 * t0 * t0,
        (c1 - 2.0 * c2 * t0) * n,
        c2 * n * n,
    ]
}

impl SignalSpec {
    /// The zero signal.
    pub fn none(n: usize) -> Self {
        Self {
            kind: SignalKind::None,
            n,
            change_points: Vec::new(),
            segments: vec![vec![0.0]],
            degree: 0,
        }
    }

    /// Piecewise-constant blocks of length 512 with four jumps.
    pub fn blocks() -> Self {
        let v = blocks_values();
        let mut change_points = Vec::new();
        let mut segments = vec![vec![v[0]]];
        for t in 2..=v.len() {
            if v[t - 1] != v[t - 2] {
                change_points.push(t);
                segments.push(vec![v[t - 1]]);
            }
        }
        Self {
            kind: SignalKind::Blocks,
            n: v.len(),
            change_points,
            segments,
            degree: 0,
        }
    }

    /// Blocks with every level multiplied by `factor`.
    pub fn blocks_scaled(factor: f64) -> Self {
        let mut s = Self::blocks();
        for seg in &mut s.segments {
            seg[0] *= factor;
        }
        s
    }

    /// The shipped sawtooth.
    pub fn waves() -> Self {
        let d = waves_defaults();
        Self::waves_with(d.n, d.change_points, d.amplitude).expect("bundled waves defaults")
    }

    /// Continuous sawtooth starting at 0, rising by `amplitude` up to the
    /// first kink and alternating direction at every kink. Slopes are
    /// `+-amplitude * n / 150` per unit of `t / n`.
    pub fn waves_with(n: usize, change_points: Vec<usize>, amplitude: f64) -> Result<Self> {
        let slope = amplitude / 150.0;
        let mut segments = Vec::with_capacity(change_points.len() + 1);
        let (mut t0, mut level, mut dir) = (1.0, 0.0, 1.0);
        let mut bounds = change_points.clone();
        bounds.push(n);
        for &b in &bounds {
            segments.push(shift_to_global([level, dir * slope, 0.0], t0, n as f64));
            level += dir * slope * (b as f64 - t0);
            t0 = b as f64;
            dir = -dir;
        }
        for seg in &mut segments {
            seg.truncate(2);
        }
        let spec = Self {
            kind: SignalKind::Waves,
            n,
            change_points,
            segments,
            degree: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The shipped bumps.
    pub fn hills() -> Self {
        let d = hills_defaults();
        Self::hills_with(d.n, d.change_points, d.height).expect("bundled hills defaults")
    }

    /// One quadratic bump `height * 4u(1 - u)` per segment, where `u` runs
    /// from 0 at the previous change point (or 0) to 1 at the next change
    /// point (or `n`).
    pub fn hills_with(n: usize, change_points: Vec<usize>, height: f64) -> Result<Self> {
        let mut bounds = vec![0usize];
        bounds.extend(&change_points);
        bounds.push(n);
        let segments = bounds
            .windows(2)
            .map(|b| {
                let len = (b[1] - b[0]) as f64;
                let c = 4.0 * height / len;
                shift_to_global([0.0, c, -c / len], b[0] as f64, n as f64)
            })
            .collect();
        let spec = Self {
            kind: SignalKind::Hills,
            n,
            change_points,
            segments,
            degree: 2,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// User-supplied segments, coefficients in powers of `t / n`.
    pub fn custom(
        n: usize,
        change_points: Vec<usize>,
        segments: Vec<Vec<f64>>,
        degree: usize,
    ) -> Result<Self> {
        let spec = Self {
            kind: SignalKind::Custom,
            n,
            change_points,
            segments,
            degree,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(CpError::EmptySeries);
        }
        if self.segments.len() != self.change_points.len() + 1 {
            return Err(CpError::Config(format!(
                "{} change points need {} segments, got {}",
                self.change_points.len(),
                self.change_points.len() + 1,
                self.segments.len()
            )));
        }
        let mut prev = 1;
        for &c in &self.change_points {
            if c <= prev || c > self.n {
                return Err(CpError::Config(format!(
                    "change points must be strictly increasing within 2..={}, got {c}",
                    self.n
                )));
            }
            prev = c;
        }
        for seg in &self.segments {
            if seg.is_empty() || seg.iter().any(|c| !c.is_finite()) {
                return Err(CpError::Config(
                    "each segment needs finite coefficients".into(),
                ));
            }
        }
        Ok(())
    }

    /// Value of the mean at index `t`.
    pub fn value(&self, t: usize) -> f64 {
        let k = self.change_points.partition_point(|&c| c <= t);
        let x = t as f64 / self.n as f64;
        self.segments[k].iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Evaluates the mean vector.
pub fn gen_signal(spec: &SignalSpec) -> Result<TimeSeries> {
    spec.validate()?;
    TimeSeries::new((1..=spec.n).map(|t| spec.value(t)).collect())
}
