// SPDX-License-Identifier: MIT OR Apache-2.0

//! Greedy finest-scale-first interval search and the `detect` pipeline.
//!
//! The search scans the grid windows inside a segment `{s, ..., e}` from the
//! finest scale upward, left to right. The first window whose statistic
//! exceeds the threshold is recorded, and the search restarts on the parts
//! of the segment strictly to the left and to the right of it. Recorded
//! windows are therefore pairwise disjoint.
//!
//! Every window finer than the triggering one, and every window at the same
//! scale to its left, has already been evaluated below the threshold, so
//! the child searches resume where the parent stopped. Each grid window is
//! evaluated at most once per call, giving `O(n log n)` total work.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::grid::GridSpec;
use crate::kernel::{diff_sum_unchecked, DiffWeights, PrefixSums, TimeSeries};
use crate::localize::best_split;
use crate::scale::{estimate_scale, ScaleEstimate, ScaleMethod};
use crate::thresholds::{lambda_alpha, NoiseMode, ThresholdParams, ThresholdValue};

/// How a detection is chosen among the exceedances of a scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// The first exceedance in (width, location) order.
    #[default]
    FirstExceedance,
    /// The largest statistic within the finest scale that has an exceedance.
    ScaleArgmax,
}

/// A grid window on which the local test rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificantInterval {
    pub start: usize,
    pub end: usize,
    pub width: usize,
    /// `|D|` at detection, in data units (not divided by the scale).
    pub stat: f64,
    /// Localised change point: last index of the left piece.
    pub eta_hat: usize,
    /// Residual sum of squares of the best split, absent on fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_rss: Option<f64>,
    /// True when the interval was too narrow to split and `eta_hat` is the
    /// midpoint.
    #[serde(default)]
    pub midpoint_fallback: bool,
}

impl SignificantInterval {
    fn new(l: usize, w: usize, stat: f64) -> Self {
        Self {
            start: l,
            end: l + w - 1,
            width: w,
            stat,
            eta_hat: (2 * l + w - 1) / 2,
            split_rss: None,
            midpoint_fallback: true,
        }
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t <= self.end
    }
}

/// Detection settings. `None` fields take the mode-dependent defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub degree: usize,
    pub alpha: f64,
    pub decay: f64,
    pub min_scale: Option<usize>,
    pub mode: NoiseMode,
    pub estimator: ScaleMethod,
    pub lrv_block: Option<usize>,
    pub selection: Selection,
    /// Use this noise scale instead of estimating it.
    pub known_scale: Option<f64>,
    /// Use this `lambda_alpha` instead of the extreme-value formula.
    pub lambda_override: Option<f64>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self::dif1_mad(0)
    }
}

impl DetectionConfig {
    fn base(degree: usize, mode: NoiseMode, estimator: ScaleMethod) -> Self {
        Self {
            degree,
            alpha: 0.1,
            decay: std::f64::consts::SQRT_2,
            min_scale: None,
            mode,
            estimator,
            lrv_block: None,
            selection: Selection::FirstExceedance,
            known_scale: None,
            lambda_override: None,
        }
    }

    /// Gaussian thresholds with the MAD scale.
    pub fn dif1_mad(degree: usize) -> Self {
        Self::base(degree, NoiseMode::Gaussian, ScaleMethod::Mad)
    }

    /// Dependent-noise thresholds with the difference-based scale.
    pub fn dif2_sd(degree: usize) -> Self {
        Self::base(degree, NoiseMode::Dependent, ScaleMethod::Dif)
    }

    /// Dependent-noise thresholds with the long-run scale.
    pub fn dif2_lrv(degree: usize) -> Self {
        Self::base(degree, NoiseMode::Dependent, ScaleMethod::Lrv)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_known_scale(mut self, scale: f64) -> Self {
        self.known_scale = Some(scale);
        self
    }

    /// Minimum scale for a series of length `n`.
    pub fn resolved_min_scale(&self, n: usize) -> usize {
        self.min_scale
            .unwrap_or_else(|| default_min_scale(n, self.mode))
    }

    pub fn validate(&self) -> Result<()> {
        if self.estimator == ScaleMethod::Lrv && self.mode != NoiseMode::Dependent {
            return Err(CpError::Config(
                "the long-run variance estimator requires dependent mode".into(),
            ));
        }
        if self.estimator == ScaleMethod::Known && self.known_scale.is_none() {
            return Err(CpError::Config("estimator `known` needs a scale value".into()));
        }
        if let Some(s) = self.known_scale {
            if !(s.is_finite() && s >= 0.0) {
                return Err(CpError::param("scale", format!("must be finite and >= 0, got {s}")));
            }
        }
        if let Some(l) = self.lambda_override {
            if l.is_nan() || l <= 0.0 {
                return Err(CpError::param("lambda", format!("must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

/// `floor(ln n)` in Gaussian mode, `floor(sqrt(n) / 2)` in dependent mode.
pub fn default_min_scale(n: usize, mode: NoiseMode) -> usize {
    match mode {
        NoiseMode::Gaussian => (n as f64).ln().floor() as usize,
        NoiseMode::Dependent => isqrt(n) / 2,
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Resolved parameters echoed in the result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    pub degree: usize,
    pub alpha: f64,
    pub decay: f64,
    pub min_scale: usize,
    pub selection: Selection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub n: usize,
    pub mode: NoiseMode,
    /// `lambda_alpha`, the scale-free threshold.
    pub lambda: f64,
    /// Limit constant that entered `lambda` (0 when overridden).
    pub h_used: f64,
    pub sigma_hat: f64,
    pub estimator: ScaleMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lrv_block: Option<usize>,
    /// `sigma_hat * lambda`.
    pub threshold: f64,
    pub params: DetectionParams,
    pub intervals: Vec<SignificantInterval>,
    pub grid_size: usize,
    pub evaluations: u64,
    pub elapsed_ms: f64,
}

impl DetectionResult {
    pub fn threshold_value(&self) -> ThresholdValue {
        ThresholdValue {
            lambda_alpha: self.lambda,
            h_used: self.h_used,
            mode: self.mode,
        }
    }

    pub fn scale(&self) -> ScaleEstimate {
        ScaleEstimate {
            value: self.sigma_hat,
            method: self.estimator,
            block: self.lrv_block,
        }
    }
}

/// Output of a raw search: intervals plus the number of statistics computed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchOutcome {
    pub intervals: Vec<SignificantInterval>,
    pub evaluations: u64,
}

struct Frame {
    s: usize,
    e: usize,
    scale_from: usize,
    l_from: usize,
}

/// Greedy interval search on `{s, ..., e}` with first-exceedance selection.
pub fn greedy_interval_search(
    ps: &PrefixSums,
    grid: &GridSpec,
    s: usize,
    e: usize,
    threshold: f64,
    weights: &DiffWeights,
) -> Vec<SignificantInterval> {
    search_with(ps, grid, s, e, threshold, weights, Selection::FirstExceedance).intervals
}

/// Greedy interval search with an explicit selection rule, also reporting
/// how many statistics were evaluated. Intervals come back sorted by start.
pub fn search_with(
    ps: &PrefixSums,
    grid: &GridSpec,
    s: usize,
    e: usize,
    threshold: f64,
    weights: &DiffWeights,
    selection: Selection,
) -> SearchOutcome {
    let p = weights.degree();
    let stop_gap = grid.min_scale().min(p + 1);
    let scales = grid.scales();
    let e = e.min(ps.n());
    let mut out = SearchOutcome::default();
    let mut stack = vec![Frame {
        s: s.max(1),
        e,
        scale_from: 0,
        l_from: 0,
    }];

    while let Some(Frame {
        s,
        e,
        scale_from,
        l_from,
    }) = stack.pop()
    {
        if e < s || e - s < stop_gap {
            continue;
        }
        'scales: for (k, &w) in scales.iter().enumerate().skip(scale_from) {
            let chunk = w / weights.chunks();
            if chunk == 0 {
                continue;
            }
            let hi = grid.last_start(w, e);
            if hi < s {
                // wider windows do not fit either
                break;
            }
            let lo = if k == scale_from { s.max(l_from) } else { s };
            let norm = weights.norm(chunk);
            let cut = threshold * norm;
            match selection {
                Selection::FirstExceedance => {
                    for l in lo..=hi {
                        out.evaluations += 1;
                        let raw = diff_sum_unchecked(ps, l, chunk, weights).abs();
                        if raw > cut {
                            out.intervals.push(SignificantInterval::new(l, w, raw / norm));
                            // right part resumes at this scale, left part at the next
                            stack.push(Frame {
                                s: l + w,
                                e,
                                scale_from: k,
                                l_from: l + w,
                            });
                            stack.push(Frame {
                                s,
                                e: l - 1,
                                scale_from: k + 1,
                                l_from: 0,
                            });
                            break 'scales;
                        }
                    }
                }
                Selection::ScaleArgmax => {
                    let mut best: Option<(usize, f64)> = None;
                    for l in lo..=hi {
                        out.evaluations += 1;
                        let raw = diff_sum_unchecked(ps, l, chunk, weights).abs();
                        if raw > cut && best.is_none_or(|(_, b)| raw > b) {
                            best = Some((l, raw));
                        }
                    }
                    if let Some((l, raw)) = best {
                        out.intervals.push(SignificantInterval::new(l, w, raw / norm));
                        stack.push(Frame {
                            s: l + w,
                            e,
                            scale_from: k,
                            l_from: 0,
                        });
                        stack.push(Frame {
                            s,
                            e: l - 1,
                            scale_from: k,
                            l_from: 0,
                        });
                        break 'scales;
                    }
                }
            }
        }
    }
    out.intervals.sort_by_key(|iv| iv.start);
    out
}

/// Threshold parameters implied by `cfg` for a series of length `n`.
pub fn threshold_params(cfg: &DetectionConfig, n: usize) -> ThresholdParams {
    ThresholdParams {
        n,
        min_scale: cfg.resolved_min_scale(n),
        decay: cfg.decay,
        degree: cfg.degree,
        alpha: cfg.alpha,
        mode: cfg.mode,
    }
}

/// Full pipeline: scale estimate, threshold, grid search, localisation.
pub fn detect(ts: &TimeSeries, cfg: &DetectionConfig) -> Result<DetectionResult> {
    let started = Instant::now();
    cfg.validate()?;
    let n = ts.len();
    let weights = DiffWeights::new(cfg.degree)?;
    let min_scale = cfg.resolved_min_scale(n);
    let grid = GridSpec::new(n, min_scale, cfg.decay)?;

    let scale = match cfg.known_scale {
        Some(value) => ScaleEstimate {
            value,
            method: ScaleMethod::Known,
            block: None,
        },
        None => estimate_scale(ts, cfg.degree, cfg.estimator, cfg.lrv_block)?,
    };
    if scale.value <= 0.0 {
        return Err(CpError::DegenerateScale);
    }

    let lambda = match cfg.lambda_override {
        Some(l) => ThresholdValue {
            lambda_alpha: l,
            h_used: 0.0,
            mode: cfg.mode,
        },
        None => lambda_alpha(&threshold_params(cfg, n))?,
    };
    let threshold = scale.value * lambda.lambda_alpha;

    let ps = PrefixSums::new(ts);
    let mut outcome = search_with(&ps, &grid, 1, n, threshold, &weights, cfg.selection);
    for iv in &mut outcome.intervals {
        let fit = best_split(ts, iv.start, iv.end, cfg.degree)?;
        iv.eta_hat = fit.eta;
        iv.split_rss = fit.rss;
        iv.midpoint_fallback = fit.fallback;
    }

    Ok(DetectionResult {
        n,
        mode: cfg.mode,
        lambda: lambda.lambda_alpha,
        h_used: lambda.h_used,
        sigma_hat: scale.value,
        estimator: scale.method,
        lrv_block: scale.block,
        threshold,
        params: DetectionParams {
            degree: cfg.degree,
            alpha: cfg.alpha,
            decay: cfg.decay,
            min_scale,
            selection: cfg.selection,
        },
        intervals: outcome.intervals,
        grid_size: grid.len(),
        evaluations: outcome.evaluations,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}
