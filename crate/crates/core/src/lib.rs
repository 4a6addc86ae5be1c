// SPDX-License-Identifier: MIT OR Apache-2.0

//! Change-point inference for piecewise-polynomial signals.
//!
//! [`detect`] returns disjoint intervals of the index set, each of which
//! contains a change point with family-wise confidence `1 - alpha`. Local
//! tests are differences of local sums evaluated in constant time on a
//! sparse a-adic grid of windows; the rejection threshold comes from the
//! extreme-value limit of the maximum statistic over that grid, so a coarser
//! grid pays less for multiple testing.
//!
//! ```
//! use cpinfer::{detect, DetectionConfig, TimeSeries};
//!
//! let y: Vec<f64> = (1..=400)
//!     .map(|t| if t <= 200 { 0.0 } else { 3.0 } + ((t * 7919) % 13) as f64 / 13.0 - 0.5)
//!     .collect();
//! let result = detect(&TimeSeries::new(y).unwrap(), &DetectionConfig::dif1_mad(0)).unwrap();
//! for iv in &result.intervals {
//!     println!("[{}, {}] eta = {}", iv.start, iv.end, iv.eta_hat);
//! }
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod localize;
pub mod scale;
pub mod search;
pub mod sim;
pub mod special;
pub mod thresholds;

pub use error::{CpError, Result};
pub use grid::{build_grid, Candidate, GridSpec};
pub use kernel::{binomials, build_prefix_sums, diff_stat, DiffWeights, PrefixSums, TimeSeries};
pub use localize::{best_split, midpoint, poly_fit_rss, PolyFit, SplitFit};
pub use scale::{dif_sigma, estimate_scale, lrv_tau, mad_sigma, ScaleEstimate, ScaleMethod};
pub use search::{
    detect, greedy_interval_search, search_with, DetectionConfig, DetectionResult,
    SignificantInterval, Selection,
};
pub use thresholds::{
    c_p, h1, h2, lambda_alpha, lambda_dependent, lambda_gaussian, p_inf, Bound, NoiseMode,
    ThresholdParams, ThresholdReport, ThresholdValue,
};
