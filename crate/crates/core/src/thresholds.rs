// SPDX-License-Identifier: MIT OR Apache-2.0

//! Extreme-value thresholds for the maximum of the grid statistics.
//!
//! Two regimes are supported. Under iid Gaussian noise with a minimum scale
//! of order `log n` the threshold is built from the discrete-grid constant
//! `H_{1,2}`, which involves the Pickands-type function `p_inf`. Under
//! dependent or non-Gaussian noise (minimum scale growing polynomially in
//! `n`) the closed-form constant `H_{2,2}` is used instead.
//!
//! All logarithms are natural. The returned `lambda_alpha` is free of the
//! noise scale; the search threshold is `scale * lambda_alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{CpError, Result};
use crate::kernel::{binomial_row, MAX_DEGREE};
use crate::special::{norm_sf, zeta_half_minus};

/// Smallest series length accepted by the threshold formulas.
pub const MIN_THRESHOLD_N: usize = 50;

/// Default absolute tolerance on truncated series.
pub const SERIES_TOL: f64 = 1e-12;

const TERM_TOL: f64 = 1e-15;

// Below this argument p_inf switches from direct summation to the small-x
// expansion; both are accurate on either side of the switch.
const SMALL_X_SWITCH: f64 = 1.0;

/// Which noise regime the threshold is calibrated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// iid Gaussian noise, minimum scale of order `log n`.
    Gaussian,
    /// Weakly dependent and/or non-Gaussian noise, minimum scale of order `n^θ`.
    Dependent,
}

impl std::fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseMode::Gaussian => "gaussian",
            NoiseMode::Dependent => "dependent",
        })
    }
}

/// Lower (`b = 1/a`) or upper (`b = 1`) limit constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    fn b(self, a: f64) -> f64 {
        match self {
            Bound::Lower => 1.0 / a,
            Bound::Upper => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub n: usize,
    pub min_scale: usize,
    pub decay: f64,
    pub degree: usize,
    pub alpha: f64,
    pub mode: NoiseMode,
}

impl ThresholdParams {
    /// `d = W / ln n`, evaluated at the given `n`.
    pub fn d(&self) -> f64 {
        self.min_scale as f64 / (self.n as f64).ln()
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CpError::param(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        check_decay(self.decay)?;
        check_degree(self.degree)?;
        if self.n < MIN_THRESHOLD_N {
            return Err(CpError::SmallSample {
                n: self.n,
                min: MIN_THRESHOLD_N,
            });
        }
        if self.min_scale == 0 {
            return Err(CpError::param("W", "minimum scale must be positive"));
        }
        if self.mode == NoiseMode::Dependent
            && (self.n as f64 / self.min_scale as f64) <= std::f64::consts::E
        {
            return Err(CpError::param(
                "W",
                format!(
                    "dependent mode needs n / W > e, got n = {} and W = {}",
                    self.n, self.min_scale
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdValue {
    pub lambda_alpha: f64,
    /// The limit constant that entered the formula (`H_{1,2}` or `H_{2,2}`).
    pub h_used: f64,
    pub mode: NoiseMode,
}

/// All constants behind a threshold, for diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub params: ThresholdParams,
    pub c_p: f64,
    /// `W / ln n`.
    pub d: f64,
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
    pub lambda_alpha: f64,
}

fn check_decay(a: f64) -> Result<()> {
    if a.is_finite() && a > 1.0 {
        Ok(())
    } else {
        Err(CpError::param("a", format!("decay must exceed 1, got {a}")))
    }
}

fn check_degree(p: usize) -> Result<()> {
    if p > MAX_DEGREE {
        Err(CpError::UnsupportedDegree(p))
    } else {
        Ok(())
    }
}

/// Local-structure constant `C_p`.
pub fn c_p(p: usize) -> Result<f64> {
    check_degree(p)?;
    let row = binomial_row(p + 1);
    let cross: i64 = (1..=p + 1).map(|j| row[j] * row[j - 1]).sum();
    let sumsq: i64 = row.iter().map(|c| c * c).sum();
    Ok((p + 2) as f64 * (1.0 + cross as f64 / sumsq as f64))
}

/// Discrete-grid Pickands-type constant
/// `p_inf(x) = exp(-sum_{k>=1} k^{-1} Phibar(sqrt(k x / 4)))`.
pub fn p_inf(x: f64) -> Result<f64> {
    p_inf_with_tol(x, SERIES_TOL)
}

/// [`p_inf`] with an explicit bound on the truncation error of the series.
pub fn p_inf_with_tol(x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(CpError::param("x", format!("p_inf needs x > 0, got {x}")));
    }
    let s = if x >= SMALL_X_SWITCH {
        tail_series_direct(x, tol)
    } else {
        tail_series_small_x(x, tol)
    };
    Ok((-s).exp())
}

/// `sum_k k^{-1} Phibar(sqrt(k x / 4))` by direct summation. The remainder
/// after term `k` is bounded by `sum_{j>k} e^{-j x / 8} / (2j)`, a geometric
/// series, using `Phibar(y) <= exp(-y^2 / 2) / 2`.
pub(crate) fn tail_series_direct(x: f64, tol: f64) -> f64 {
    let ratio = (-x / 8.0).exp();
    let mut sum = 0.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let term = norm_sf((kf * x / 4.0).sqrt()) / kf;
        sum += term;
        let next = kf + 1.0;
        let remainder = ratio.powf(next) / (2.0 * next * (1.0 - ratio));
        if (term < TERM_TOL && remainder < tol) || term == 0.0 {
            return sum;
        }
        k += 1;
    }
}

/// The same series via its Mellin-transform expansion around `x = 0`:
/// `-ln(x/2)/2 - sum_m (-1)^m zeta(1/2 - m) c^(m+1/2) / (2^(m+3/2) m! sqrt(pi) (m + 1/2))`
/// with `c = x / 4`. The expansion converges for `x < 16 pi`.
pub(crate) fn tail_series_small_x(x: f64, tol: f64) -> f64 {
    let c = x / 4.0;
    let mut sum = -0.5 * (2.0 * c).ln();
    // running value of c^(m+1/2) / (2^(m+3/2) m! sqrt(pi))
    let mut scale = c.sqrt() / (2f64.powf(1.5) * std::f64::consts::PI.sqrt());
    for m in 0..200usize {
        if m > 0 {
            scale *= c / (2.0 * m as f64);
        }
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        let term = sign * zeta_half_minus(m) * scale / (m as f64 + 0.5);
        sum += term;
        if term.abs() < tol * 1e-3 {
            break;
        }
    }
    sum
}

/// Gaussian-regime limit constant
/// `H_{1,i} = sum_{j>=0} p_inf(2 C_p / (a^j b_i d))^2`.
pub fn h1(a: f64, p: usize, d: f64, which: Bound) -> Result<f64> {
    h1_with_tol(a, p, d, which, SERIES_TOL)
}

pub fn h1_with_tol(a: f64, p: usize, d: f64, which: Bound, tol: f64) -> Result<f64> {
    check_decay(a)?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(CpError::param("d", format!("must be positive, got {d}")));
    }
    let x0 = 2.0 * c_p(p)? / (which.b(a) * d);
    let mut sum = 0.0;
    let mut x = x0;
    loop {
        let term = p_inf_with_tol(x, tol)?.powi(2);
        sum += term;
        x /= a;
        // p_inf(x)^2 <= x / 2, so the remaining terms sum to at most
        // (x / 2) / (1 - 1/a).
        if x < 1.0 && x / (2.0 * (1.0 - 1.0 / a)) < tol {
            return Ok(sum);
        }
    }
}

/// Dependent-regime limit constant `H_{2,i} = b_i^{-1} C_p / (1 - a^{-1})`.
pub fn h2(a: f64, p: usize, which: Bound) -> Result<f64> {
    check_decay(a)?;
    Ok(c_p(p)? / (which.b(a) * (1.0 - 1.0 / a)))
}

/// `ln(-2 / ln(1 - alpha))`.
fn alpha_term(alpha: f64) -> f64 {
    (-2.0 / (-alpha).ln_1p()).ln()
}

/// Threshold under iid Gaussian noise.
pub fn lambda_gaussian(params: &ThresholdParams) -> Result<ThresholdValue> {
    lambda_gaussian_with_tol(params, SERIES_TOL)
}

pub fn lambda_gaussian_with_tol(params: &ThresholdParams, tol: f64) -> Result<ThresholdValue> {
    if params.mode != NoiseMode::Gaussian {
        return Err(CpError::param("mode", "lambda_gaussian needs gaussian mode"));
    }
    params.validate()?;
    let h = h1_with_tol(params.decay, params.degree, params.d(), Bound::Upper, tol)?;
    let ln_n = (params.n as f64).ln();
    let root = (2.0 * ln_n).sqrt();
    let numer = -0.5 * ln_n.ln() - (2.0 * std::f64::consts::PI.sqrt() / h).ln()
        + alpha_term(params.alpha);
    Ok(ThresholdValue {
        lambda_alpha: root + numer / root,
        h_used: h,
        mode: NoiseMode::Gaussian,
    })
}

/// Threshold under dependent and/or non-Gaussian noise.
pub fn lambda_dependent(params: &ThresholdParams) -> Result<ThresholdValue> {
    if params.mode != NoiseMode::Dependent {
        return Err(CpError::param(
            "mode",
            "lambda_dependent needs dependent mode",
        ));
    }
    params.validate()?;
    let h = h2(params.decay, params.degree, Bound::Upper)?;
    let ln_nw = (params.n as f64 / params.min_scale as f64).ln();
    let root = (2.0 * ln_nw).sqrt();
    let numer = 0.5 * ln_nw.ln() - (std::f64::consts::PI.sqrt() / h).ln()
        + alpha_term(params.alpha);
    Ok(ThresholdValue {
        lambda_alpha: root + numer / root,
        h_used: h,
        mode: NoiseMode::Dependent,
    })
}

/// Threshold for whichever mode `params` names.
pub fn lambda_alpha(params: &ThresholdParams) -> Result<ThresholdValue> {
    match params.mode {
        NoiseMode::Gaussian => lambda_gaussian(params),
        NoiseMode::Dependent => lambda_dependent(params),
    }
}

/// Every constant entering the threshold, plus the threshold itself.
pub fn threshold_report(params: &ThresholdParams) -> Result<ThresholdReport> {
    let value = lambda_alpha(params)?;
    let d = params.d();
    Ok(ThresholdReport {
        params: params.clone(),
        c_p: c_p(params.degree)?,
        d,
        h11: h1(params.decay, params.degree, d, Bound::Lower)?,
        h12: h1(params.decay, params.degree, d, Bound::Upper)?,
        h21: h2(params.decay, params.degree, Bound::Lower)?,
        h22: h2(params.decay, params.degree, Bound::Upper)?,
        lambda_alpha: value.lambda_alpha,
    })
}
