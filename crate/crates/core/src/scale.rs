// SPDX-License-Identifier: MIT OR Apache-2.0

//! Noise-scale estimators that are blind to a piecewise degree-`p` signal.
//!
//! Each estimator works on `(p + 1)`-th differences, which remove the
//! polynomial pieces everywhere except near change points:
//!
//! * [`mad_sigma`]: median absolute difference, for iid Gaussian noise.
//! * [`dif_sigma`]: mean squared difference, for iid light-tailed noise.
//! * [`lrv_tau`]: mean squared difference of block sums, for serially
//!   dependent noise; estimates the long-run standard deviation.

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::kernel::{difference, DiffWeights, TimeSeries};
use crate::special::NORM_Q75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMethod {
    Mad,
    Dif,
    Lrv,
    /// Supplied by the caller rather than estimated.
    Known,
}

impl std::fmt::Display for ScaleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScaleMethod::Mad => "mad",
            ScaleMethod::Dif => "dif",
            ScaleMethod::Lrv => "lrv",
            ScaleMethod::Known => "known",
        })
    }
}

impl std::str::FromStr for ScaleMethod {
    type Err = CpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mad" => Ok(ScaleMethod::Mad),
            "dif" | "sd" => Ok(ScaleMethod::Dif),
            "lrv" => Ok(ScaleMethod::Lrv),
            other => Err(CpError::param(
                "estimator",
                format!("unknown estimator `{other}` (expected mad, dif or lrv)"),
            )),
        }
    }
}

/// A standard-deviation-scale estimate (`sigma` or long-run `tau`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimate {
    pub value: f64,
    pub method: ScaleMethod,
    /// Block size used by the long-run estimator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
}

/// Largest `k` with `k^3 <= n`, the default long-run block size.
pub fn default_lrv_block(n: usize) -> usize {
    let mut k = (n as f64).cbrt().round() as usize;
    while k * k * k > n {
        k -= 1;
    }
    while (k + 1) * (k + 1) * (k + 1) <= n {
        k += 1;
    }
    k.max(1)
}

fn require_len(ts: &TimeSeries, p: usize) -> Result<DiffWeights> {
    let weights = DiffWeights::new(p)?;
    if ts.len() < p + 3 {
        return Err(CpError::TooShort {
            n: ts.len(),
            needed: p + 3,
        });
    }
    Ok(weights)
}

/// Midpoint of the two central order statistics for even lengths.
pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let m = v.len();
    debug_assert!(m > 0);
    let (_, upper, _) = v.select_nth_unstable_by(m / 2, f64::total_cmp);
    let upper = *upper;
    if m % 2 == 1 {
        return upper;
    }
    let lower = v[..m / 2]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    0.5 * (lower + upper)
}

/// Generalised MAD estimate of `sigma`.
pub fn mad_sigma(ts: &TimeSeries, p: usize) -> Result<ScaleEstimate> {
    let weights = require_len(ts, p)?;
    let mut abs: Vec<f64> = difference(ts.values(), &weights)
        .into_iter()
        .map(f64::abs)
        .collect();
    let med = median_in_place(&mut abs);
    Ok(ScaleEstimate {
        value: med / (NORM_Q75 * (weights.sumsq() as f64).sqrt()),
        method: ScaleMethod::Mad,
        block: None,
    })
}

/// Difference-based estimate of `sigma`.
pub fn dif_sigma(ts: &TimeSeries, p: usize) -> Result<ScaleEstimate> {
    let weights = require_len(ts, p)?;
    let diffs = difference(ts.values(), &weights);
    let ss: f64 = diffs.iter().map(|x| x * x).sum();
    let var = ss / (diffs.len() as f64 * weights.sumsq() as f64);
    Ok(ScaleEstimate {
        value: var.sqrt(),
        method: ScaleMethod::Dif,
        block: None,
    })
}

/// Block-difference estimate of the long-run standard deviation `tau`.
/// `block` defaults to `floor(n^(1/3))`; a trailing partial block is dropped.
pub fn lrv_tau(ts: &TimeSeries, p: usize, block: Option<usize>) -> Result<ScaleEstimate> {
    let weights = DiffWeights::new(p)?;
    let n = ts.len();
    let block = block.unwrap_or_else(|| default_lrv_block(n));
    if block == 0 {
        return Err(CpError::param("lrv-block", "block size must be positive"));
    }
    let blocks = n / block;
    if blocks < p + 3 {
        return Err(CpError::TooShort {
            n,
            needed: (p + 3) * block,
        });
    }
    let sums: Vec<f64> = ts
        .values()
        .chunks_exact(block)
        .map(|c| c.iter().sum())
        .collect();
    let diffs = difference(&sums, &weights);
    let ss: f64 = diffs.iter().map(|x| x * x).sum();
    let var = ss / (diffs.len() as f64 * block as f64 * weights.sumsq() as f64);
    Ok(ScaleEstimate {
        value: var.sqrt(),
        method: ScaleMethod::Lrv,
        block: Some(block),
    })
}

/// Dispatches to the estimator named by `method`.
pub fn estimate_scale(
    ts: &TimeSeries,
    p: usize,
    method: ScaleMethod,
    lrv_block: Option<usize>,
) -> Result<ScaleEstimate> {
    match method {
        ScaleMethod::Mad => mad_sigma(ts, p),
        ScaleMethod::Dif => dif_sigma(ts, p),
        ScaleMethod::Lrv => lrv_tau(ts, p, lrv_block),
        ScaleMethod::Known => Err(CpError::Config(
            "a known scale cannot be estimated from data".into(),
        )),
    }
}
