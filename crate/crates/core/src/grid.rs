// SPDX-License-Identifier: MIT OR Apache-2.0

//! The sparse a-adic grid of `(location, width)` test windows.

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};

// Slack so that exact powers such as sqrt(2)^4 = 4 survive rounding.
const POW_SLACK: f64 = 1e-12;

/// Widths `floor(a^k)` for `floor(log_a W) <= k <= floor(log_a(n/2))`,
/// deduplicated and sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    min_scale: usize,
    decay: f64,
    scales: Vec<usize>,
}

/// A single test window `{l, ..., l + w - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Candidate {
    pub l: usize,
    pub w: usize,
}

impl Candidate {
    pub fn end(&self) -> usize {
        self.l + self.w - 1
    }
}

/// Largest integer `k >= 0` with `a^k <= x` (`x >= 1`).
fn floor_log(x: f64, a: f64) -> u32 {
    let mut k = 0u32;
    while a.powi(k as i32 + 1) <= x * (1.0 + POW_SLACK) {
        k += 1;
    }
    k
}

impl GridSpec {
    pub fn new(n: usize, min_scale: usize, decay: f64) -> Result<Self> {
        if !(decay.is_finite() && decay > 1.0) {
            return Err(CpError::param("a", format!("decay must exceed 1, got {decay}")));
        }
        if min_scale < 2 {
            return Err(CpError::param(
                "W",
                format!("minimum scale must be at least 2, got {min_scale}"),
            ));
        }
        if n < 2 * min_scale {
            return Err(CpError::EmptyScaleSet { n, min_scale });
        }
        let k_lo = floor_log(min_scale as f64, decay);
        let k_hi = floor_log(n as f64 / 2.0, decay);
        let mut scales: Vec<usize> = (k_lo..=k_hi)
            .map(|k| (decay.powi(k as i32) * (1.0 + POW_SLACK)).floor() as usize)
            .filter(|&w| w >= 2 && 2 * w <= n)
            .collect();
        scales.dedup();
        if scales.is_empty() {
            return Err(CpError::EmptyScaleSet { n, min_scale });
        }
        Ok(Self {
            n,
            min_scale,
            decay,
            scales,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn min_scale(&self) -> usize {
        self.min_scale
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn contains_scale(&self, w: usize) -> bool {
        self.scales.binary_search(&w).is_ok()
    }

    /// Number of `(l, w)` pairs in the full grid.
    pub fn len(&self) -> usize {
        self.scales.iter().map(|&w| self.n - w).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest admissible start for width `w` inside `{s, ..., e}`.
    #[inline]
    pub(crate) fn last_start(&self, w: usize, e: usize) -> usize {
        // grid constraint l <= n - w, segment constraint l + w - 1 <= e
        (self.n - w).min((e + 1).saturating_sub(w))
    }

    /// Grid windows contained in `{s, ..., e}`, finest scale first and left
    /// to right within a scale.
    pub fn enumerate(&self, s: usize, e: usize) -> impl Iterator<Item = Candidate> + '_ {
        let s = s.max(1);
        self.scales.iter().flat_map(move |&w| {
            let hi = self.last_start(w, e);
            (s..=hi).map(move |l| Candidate { l, w })
        })
    }
}

/// Builds the grid for a series of length `n`.
pub fn build_grid(n: usize, min_scale: usize, decay: f64) -> Result<GridSpec> {
    GridSpec::new(n, min_scale, decay)
}
