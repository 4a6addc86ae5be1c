// SPDX-License-Identifier: MIT OR Apache-2.0

//! Point estimates of the change location inside a significant interval.
//!
//! [`best_split`] fits a degree-`p` polynomial on each side of every
//! admissible split and keeps the split with the smallest total residual sum
//! of squares. Residual sums for all prefixes and all suffixes are obtained
//! in one forward and one backward sweep of a Givens-updated QR
//! factorisation, so the whole search costs `O(width * p^2)`.
//!
//! Fits use Chebyshev polynomials of a coordinate mapped onto `[-1, 1]`
//! over the fitted window; raw powers of `t / n` give near-singular normal
//! equations on short windows.

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::kernel::{binomial_row, TimeSeries, MAX_DEGREE};

/// Least-squares polynomial fit on a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    /// Coefficients of `1, (t/n), (t/n)^2, ...`.
    pub coefficients: Vec<f64>,
    pub rss: f64,
}

/// Outcome of the split search on one interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitFit {
    /// Last index of the left piece; the right piece starts at `eta + 1`.
    pub eta: usize,
    /// Total residual sum of squares; `None` when the interval was too narrow
    /// and the midpoint was used instead.
    pub rss: Option<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub fallback: bool,
}

/// Affine map from the time index onto `[-1, 1]` over `{start, ..., end}`.
#[derive(Clone, Copy, Debug)]
struct UnitMap {
    start: f64,
    half: f64,
}

impl UnitMap {
    fn new(start: usize, end: usize) -> Self {
        let half = (end - start) as f64 / 2.0;
        Self {
            start: start as f64,
            half,
        }
    }

    #[inline]
    fn u(&self, t: usize) -> f64 {
        if self.half == 0.0 {
            0.0
        } else {
            (t as f64 - self.start) / self.half - 1.0
        }
    }
}

#[inline]
fn chebyshev_row(u: f64, out: &mut [f64]) {
    let q = out.len();
    out[0] = 1.0;
    if q > 1 {
        out[1] = u;
    }
    for j in 2..q {
        out[j] = 2.0 * u * out[j - 1] - out[j - 2];
    }
}

/// Row-by-row least squares through Givens rotations.
#[derive(Clone, Debug)]
struct QrAccumulator {
    q: usize,
    r: Vec<f64>,
    z: Vec<f64>,
    rss: f64,
    rows: usize,
    scratch: Vec<f64>,
}

impl QrAccumulator {
    fn new(q: usize) -> Self {
        Self {
            q,
            r: vec![0.0; q * q],
            z: vec![0.0; q],
            rss: 0.0,
            rows: 0,
            scratch: vec![0.0; q],
        }
    }

    fn push(&mut self, map: &UnitMap, t: usize, y: f64) {
        let q = self.q;
        let mut x = std::mem::take(&mut self.scratch);
        chebyshev_row(map.u(t), &mut x);
        let mut y = y;
        for i in 0..q {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let rii = self.r[i * q + i];
            let h = rii.hypot(xi);
            let (c, s) = (rii / h, xi / h);
            self.r[i * q + i] = h;
            for j in i + 1..q {
                let rij = self.r[i * q + j];
                self.r[i * q + j] = c * rij + s * x[j];
                x[j] = c * x[j] - s * rij;
            }
            let zi = self.z[i];
            self.z[i] = c * zi + s * y;
            y = c * y - s * zi;
        }
        self.rss += y * y;
        self.rows += 1;
        self.scratch = x;
    }

    /// Chebyshev coefficients by back substitution. Rank-deficient
    /// directions get a zero coefficient.
    fn solve(&self) -> Vec<f64> {
        let q = self.q;
        let mut beta = vec![0.0; q];
        let scale = (0..q)
            .map(|i| self.r[i * q + i].abs())
            .fold(0.0, f64::max);
        for i in (0..q).rev() {
            let rii = self.r[i * q + i];
            if rii.abs() <= scale * 1e-13 {
                continue;
            }
            let acc: f64 = (i + 1..q).map(|j| self.r[i * q + j] * beta[j]).sum();
            beta[i] = (self.z[i] - acc) / rii;
        }
        beta
    }
}

/// Monomial coefficients (in `u`) of `T_0, ..., T_{q-1}`.
fn chebyshev_monomials(q: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(q);
    for j in 0..q {
        let mut c = vec![0.0; q];
        match j {
            0 => c[0] = 1.0,
            1 => c[1] = 1.0,
            _ => {
                for k in 0..q - 1 {
                    c[k + 1] += 2.0 * rows[j - 1][k];
                }
                for k in 0..q {
                    c[k] -= rows[j - 2][k];
                }
            }
        }
        rows.push(c);
    }
    rows
}

/// Rewrites `sum_j beta_j T_j(u)` as a polynomial in `x = t / n`.
fn to_monomials(beta: &[f64], map: &UnitMap, n: usize) -> Vec<f64> {
    let q = beta.len();
    let cheb = chebyshev_monomials(q);
    let mut in_u = vec![0.0; q];
    for (b, row) in beta.iter().zip(&cheb) {
        for k in 0..q {
            in_u[k] += b * row[k];
        }
    }
    // u = slope * x + offset
    let (slope, offset) = if map.half == 0.0 {
        (0.0, 0.0)
    } else {
        (n as f64 / map.half, -map.start / map.half - 1.0)
    };
    let mut out = vec![0.0; q];
    for (k, &ck) in in_u.iter().enumerate() {
        if ck == 0.0 {
            continue;
        }
        let binom = binomial_row(k);
        for (i, &b) in binom.iter().enumerate() {
            out[i] += ck * b as f64 * slope.powi(i as i32) * offset.powi((k - i) as i32);
        }
    }
    out
}

fn check_window(ts: &TimeSeries, start: usize, end: usize, p: usize) -> Result<()> {
    if p > MAX_DEGREE {
        return Err(CpError::UnsupportedDegree(p));
    }
    if start == 0 || end > ts.len() || start > end {
        return Err(CpError::OutOfRange {
            start,
            end,
            n: ts.len(),
        });
    }
    if end - start + 1 < p + 1 {
        return Err(CpError::TooShort {
            n: end - start + 1,
            needed: p + 1,
        });
    }
    Ok(())
}

/// Least-squares degree-`p` fit over `{start, ..., end}`.
pub fn poly_fit_rss(ts: &TimeSeries, start: usize, end: usize, p: usize) -> Result<PolyFit> {
    check_window(ts, start, end, p)?;
    let map = UnitMap::new(start, end);
    let mut acc = QrAccumulator::new(p + 1);
    for t in start..=end {
        acc.push(&map, t, ts.values()[t - 1]);
    }
    Ok(PolyFit {
        coefficients: to_monomials(&acc.solve(), &map, ts.len()),
        rss: acc.rss,
    })
}

/// `floor((start + end) / 2)`.
pub fn midpoint(start: usize, end: usize) -> usize {
    (start + end) / 2
}

/// RSS-minimising split of `{start, ..., end}` into two degree-`p` pieces.
/// Each piece keeps at least `p + 1` points. Intervals narrower than
/// `2p + 3` fall back to the midpoint.
pub fn best_split(ts: &TimeSeries, start: usize, end: usize, p: usize) -> Result<SplitFit> {
    check_window(ts, start, end, p)?;
    let width = end - start + 1;
    if width < 2 * p + 3 {
        return Ok(SplitFit {
            eta: midpoint(start, end),
            rss: None,
            left: Vec::new(),
            right: Vec::new(),
            fallback: true,
        });
    }
    let y = &ts.values()[start - 1..end];
    let map = UnitMap::new(start, end);
    let q = p + 1;

    // prefix[i]: rss of the fit on the first i points
    let mut prefix = vec![0.0; width + 1];
    let mut acc = QrAccumulator::new(q);
    for (i, &v) in y.iter().enumerate() {
        acc.push(&map, start + i, v);
        prefix[i + 1] = acc.rss;
    }
    // suffix[i]: rss of the fit on points i.. (0-based)
    let mut suffix = vec![0.0; width + 1];
    let mut acc = QrAccumulator::new(q);
    for i in (0..width).rev() {
        acc.push(&map, start + i, y[i]);
        suffix[i] = acc.rss;
    }

    let mean = y.iter().sum::<f64>() / width as f64;
    let spread: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let tie = 1e-12 * spread.max(f64::MIN_POSITIVE);

    // left piece = first k points, k in [p + 1, width - p - 1]
    let mut best_k = q;
    let mut best = f64::INFINITY;
    for k in q..=width - q {
        let total = prefix[k] + suffix[k];
        if total < best - tie {
            best = total;
            best_k = k;
        }
    }
    let eta = start + best_k - 1;
    let left = poly_fit_rss(ts, start, eta, p)?;
    let right = poly_fit_rss(ts, eta + 1, end, p)?;
    Ok(SplitFit {
        eta,
        rss: Some(best.max(0.0)),
        left: left.coefficients,
        right: right.coefficients,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(usize) -> f64, n: usize) -> TimeSeries {
        TimeSeries::new((1..=n).map(f).collect()).unwrap()
    }

    #[test]
    fn exact_line() {
        let n = 100;
        let ts = series(|t| 2.0 + 3.0 * t as f64 / n as f64, n);
        let fit = poly_fit_rss(&ts, 1, n, 1).unwrap();
        let ss: f64 = ts.values().iter().map(|v| v * v).sum();
        assert!(fit.rss <= 1e-16 * ss, "rss {}", fit.rss);
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn degree_zero_is_mean() {
        let ts = TimeSeries::new(vec![1.0, 4.0, 2.0, 7.0, 3.0]).unwrap();
        let fit = poly_fit_rss(&ts, 2, 5, 0).unwrap();
        let mean = 4.0;
        assert!((fit.coefficients[0] - mean).abs() < 1e-14);
        let rss: f64 = [4.0, 2.0, 7.0, 3.0].iter().map(|v| (v - mean) * (v - mean)).sum();
        assert!((fit.rss - rss).abs() < 1e-12);
    }

    #[test]
    fn single_point_window() {
        let ts = TimeSeries::new(vec![1.0, 5.0, 2.0]).unwrap();
        let fit = poly_fit_rss(&ts, 2, 2, 0).unwrap();
        assert_eq!(fit.coefficients, vec![5.0]);
        assert_eq!(fit.rss, 0.0);
        assert!(poly_fit_rss(&ts, 2, 2, 1).is_err());
    }

    #[test]
    fn step_split() {
        let ts = series(|t| if t <= 100 { 0.0 } else { 5.0 }, 200);
        let fit = best_split(&ts, 80, 120, 0).unwrap();
        assert_eq!(fit.eta, 100);
        assert!(fit.rss.unwrap() < 1e-20);
        assert!(!fit.fallback);
    }

    #[test]
    fn kink_split() {
        // slope changes between t = 50 and t = 51
        let ts = series(|t| (t as f64 - 50.5).max(0.0), 100);
        let fit = best_split(&ts, 30, 70, 1).unwrap();
        assert_eq!(fit.eta, 50);
        assert!(fit.rss.unwrap() < 1e-18);
        assert!(fit.left[1].abs() < 1e-8);
        assert!((fit.right[1] - 100.0).abs() < 1e-6);
    }

    #[test]
    fn narrow_interval_falls_back() {
        let ts = series(|t| t as f64, 20);
        let fit = best_split(&ts, 3, 6, 1).unwrap();
        assert!(fit.fallback);
        assert_eq!(fit.eta, 4);
        assert_eq!(fit.rss, None);
    }

    #[test]
    fn midpoints() {
        assert_eq!(midpoint(1, 9), 5);
        assert_eq!(midpoint(1, 10), 5);
        assert_eq!(midpoint(100, 139), 119);
    }

    #[test]
    fn chebyshev_expansion() {
        let c = chebyshev_monomials(4);
        assert_eq!(c[2], vec![-1.0, 0.0, 2.0, 0.0]);
        assert_eq!(c[3], vec![0.0, -3.0, 0.0, 4.0]);
    }
}
