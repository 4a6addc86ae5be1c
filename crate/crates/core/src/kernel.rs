// SPDX-License-Identifier: MIT OR Apache-2.0

//! Constant-time difference-of-local-sums statistic.
//!
//! A window `{l, ..., l + w - 1}` is cut into `p + 2` chunks of
//! `floor(w / (p + 2))` observations each (any remainder at the right end of
//! the window is left out). The statistic is the `(p + 1)`-th difference of
//! the chunk sums, normalised to unit variance under iid unit-variance noise.
//! Differencing annihilates any degree-`p` polynomial trend, so the statistic
//! only responds to changes in the polynomial pieces.
//!
//! Indices are 1-based throughout, matching the usual `Y_1, ..., Y_n`
//! notation of the model.

use crate::error::{CpError, Result};

/// Highest polynomial degree the kernel supports.
pub const MAX_DEGREE: usize = 10;

/// An observed series `Y_1, ..., Y_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CpError::EmptySeries);
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CpError::NonFinite {
                index: i + 1,
                value: *v,
            });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a `TimeSeries` holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Y_t` for `1 <= t <= n`.
    pub fn get(&self, t: usize) -> Option<f64> {
        t.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Cumulative sums with a leading zero: `cumsum[t] = Y_1 + ... + Y_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixSums {
    cumsum: Vec<f64>,
}

impl PrefixSums {
    pub fn new(ts: &TimeSeries) -> Self {
        let mut cumsum = Vec::with_capacity(ts.len() + 1);
        let mut acc = 0.0;
        cumsum.push(acc);
        for &y in ts.values() {
            acc += y;
            cumsum.push(acc);
        }
        Self { cumsum }
    }

    /// Series length `n`.
    pub fn n(&self) -> usize {
        self.cumsum.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.cumsum
    }

    /// `Y_start + ... + Y_{start + len - 1}`.
    pub fn local_sum(&self, start: usize, len: usize) -> Result<f64> {
        let n = self.n();
        let end = start + len.max(1) - 1;
        if start == 0 || len == 0 || end > n {
            return Err(CpError::OutOfRange { start, end, n });
        }
        Ok(self.cumsum[end] - self.cumsum[start - 1])
    }

    #[inline]
    pub(crate) fn at(&self, t: usize) -> f64 {
        self.cumsum[t]
    }
}

/// Builds the prefix-sum table in a single pass.
pub fn build_prefix_sums(ts: &TimeSeries) -> PrefixSums {
    PrefixSums::new(ts)
}

/// Signed binomial weights of the `(p + 1)`-th difference.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffWeights {
    degree: usize,
    coeffs: Vec<i64>,
    sumsq: i64,
    /// Weights on the `p + 3` chunk boundaries when the statistic is written
    /// directly in terms of prefix sums.
    boundary: Vec<f64>,
}

impl DiffWeights {
    pub fn new(p: usize) -> Result<Self> {
        if p > MAX_DEGREE {
            return Err(CpError::UnsupportedDegree(p));
        }
        let m = p + 1;
        let row = binomial_row(m);
        let coeffs: Vec<i64> = row
            .iter()
            .enumerate()
            .map(|(j, &c)| if (m - j) % 2 == 0 { c } else { -c })
            .collect();
        let sumsq = row.iter().map(|c| c * c).sum();
        // sum_j c_j (P[b_{j+1}] - P[b_j]) = sum_j P[b_j] (c_{j-1} - c_j)
        let boundary = (0..=m + 1)
            .map(|j| {
                let prev = if j == 0 { 0 } else { coeffs[j - 1] };
                let cur = coeffs.get(j).copied().unwrap_or(0);
                (prev - cur) as f64
            })
            .collect();
        Ok(Self {
            degree: p,
            coeffs,
            sumsq,
            boundary,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `(-1)^(p+1-j) * C(p+1, j)` for `j = 0..=p+1`.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `sum_i C(p+1, i)^2`, which equals `C(2p+2, p+1)`.
    pub fn sumsq(&self) -> i64 {
        self.sumsq
    }

    /// Number of chunks a test window is divided into.
    /// Normalising constant `sqrt(chunk * sum C^2)` of the statistic.
    #[inline]
    pub(crate) fn norm(&self, chunk: usize) -> f64 {
        ((chunk as i64 * self.sumsq) as f64).sqrt()
    }

    pub fn chunks(&self) -> usize {
        self.degree + 2
    }
}

/// Signed binomial weights for degree `p`.
pub fn binomials(p: usize) -> Result<DiffWeights> {
    DiffWeights::new(p)
}

/// Row `m` of Pascal's triangle.
pub(crate) fn binomial_row(m: usize) -> Vec<i64> {
    let mut row = vec![1i64];
    for _ in 0..m {
        let mut next = vec![1i64; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row
}

/// The scaled `(p + 1)`-th difference of local sums on `{l, ..., l + w - 1}`.
pub fn diff_stat(ps: &PrefixSums, l: usize, w: usize, weights: &DiffWeights) -> Result<f64> {
    let n = ps.n();
    if l == 0 || w == 0 || l + w - 1 > n {
        return Err(CpError::OutOfRange {
            start: l,
            end: l + w.max(1) - 1,
            n,
        });
    }
    let chunks = weights.chunks();
    let chunk = w / chunks;
    if chunk == 0 {
        return Err(CpError::InvalidScale {
            w,
            p: weights.degree,
            chunks,
        });
    }
    Ok(diff_stat_unchecked(ps, l, chunk, weights))
}

/// Hot-path evaluation; the caller guarantees `chunk >= 1` and that the
/// window fits inside the series.
#[inline]
pub(crate) fn diff_stat_unchecked(
    ps: &PrefixSums,
    l: usize,
    chunk: usize,
    weights: &DiffWeights,
) -> f64 {
    diff_sum_unchecked(ps, l, chunk, weights) / weights.norm(chunk)
}

/// Unnormalised statistic: the signed combination of chunk sums.
#[inline]
pub(crate) fn diff_sum_unchecked(
    ps: &PrefixSums,
    l: usize,
    chunk: usize,
    weights: &DiffWeights,
) -> f64 {
    let base = l - 1;
    let mut acc = 0.0;
    for (j, &b) in weights.boundary.iter().enumerate() {
        acc += b * ps.at(base + j * chunk);
    }
    acc
}

/// `(p + 1)`-th differences of `values`, i.e. `X_{p+2}, ..., X_n`.
pub(crate) fn difference(values: &[f64], weights: &DiffWeights) -> Vec<f64> {
    let k = weights.coeffs.len();
    if values.len() < k {
        return Vec::new();
    }
    values
        .windows(k)
        .map(|win| {
            win.iter()
                .zip(&weights.coeffs)
                .map(|(y, &c)| c as f64 * y)
                .sum()
        })
        .collect()
}
