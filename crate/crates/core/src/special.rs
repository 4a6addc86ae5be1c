// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small special-function helpers used by the threshold constants.

use libm::erfc;
use libm::lgamma;

/// zeta(1/2).
pub(crate) const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

/// Standard Gaussian upper tail `P(Z > y)`.
#[inline]
pub fn norm_sf(y: f64) -> f64 {
    0.5 * erfc(y / std::f64::consts::SQRT_2)
}

/// `Phi^{-1}(3/4)`.
pub const NORM_Q75: f64 = 0.674_489_750_196_081_7;

// B_2, B_4, ..., B_16
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta for real `s > 1` by Euler-Maclaurin summation.
pub(crate) fn zeta(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    const N: f64 = 12.0;
    let mut sum: f64 = (1..N as usize).map(|k| (k as f64).powf(-s)).sum();
    sum += N.powf(-s) / 2.0 + N.powf(1.0 - s) / (s - 1.0);
    // B_2j / (2j)! * s (s+1) ... (s+2j-2) * N^(-s-2j+1)
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = i + 1;
        let rising = rising_factorial(s, 2 * j - 1);
        sum += b / factorial(2 * j) * rising * N.powf(-s - (2 * j) as f64 + 1.0);
    }
    sum
}

fn rising_factorial(s: f64, terms: usize) -> f64 {
    (0..terms).map(|i| s + i as f64).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `zeta(1/2 - m)` for integer `m >= 0`, via the functional equation.
pub(crate) fn zeta_half_minus(m: usize) -> f64 {
    if m == 0 {
        return ZETA_HALF;
    }
    let s = m as f64 + 0.5;
    let two_pi = 2.0 * std::f64::consts::PI;
    let cos = (std::f64::consts::PI * s / 2.0).cos();
    let log_mag = std::f64::consts::LN_2 - s * two_pi.ln() + lgamma(s);
    cos * log_mag.exp() * zeta(s)
}
