// SPDX-License-Identifier: MIT OR Apache-2.0

//! Independent reference implementations shared by the test suites.

#![allow(dead_code)]

use cpinfer::Candidate;

/// Direct O(w) evaluation from the definition.
pub fn direct_stat(y: &[f64], l: usize, w: usize, p: usize) -> f64 {
    let chunk = w / (p + 2);
    let mut binom = vec![1i64; p + 2];
    for j in 1..=p + 1 {
        binom[j] = binom[j - 1] * (p + 2 - j) as i64 / j as i64;
    }
    let sumsq: i64 = binom.iter().map(|c| c * c).sum();
    let mut acc = 0.0;
    for j in 0..=p + 1 {
        let sign = if (p + 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
        let start = l + j * chunk;
        let local: f64 = (start..start + chunk).map(|t| y[t - 1]).sum();
        acc += sign * binom[j] as f64 * local;
    }
    acc / ((chunk as i64 * sumsq) as f64).sqrt()
}

/// Exact scales for `a = 2` (`root = false`) or `a = sqrt(2)` (`root = true`),
/// using integer arithmetic only: `a^k <= x` is `2^k <= x` or `2^k <= x^2`.
pub fn exact_scales(n: usize, min_scale: usize, root: bool) -> Vec<usize> {
    let pow_le = |k: u32, num: usize, den: usize| {
        // a^k <= num / den
        if root {
            (1u128 << k) * (den * den) as u128 <= (num * num) as u128
        } else {
            (1u128 << k) * den as u128 <= num as u128
        }
    };
    let floor_pow = |k: u32| -> usize {
        if root {
            let v = 1u128 << k;
            let mut r = (v as f64).sqrt() as u128;
            while r * r > v {
                r -= 1;
            }
            while (r + 1) * (r + 1) <= v {
                r += 1;
            }
            r as usize
        } else {
            1usize << k
        }
    };
    let k_lo = (0..64).take_while(|&k| pow_le(k, min_scale, 1)).last().unwrap();
    let k_hi = (0..64).take_while(|&k| pow_le(k, n, 2)).last().unwrap();
    let mut out: Vec<usize> = (k_lo..=k_hi)
        .map(floor_pow)
        .filter(|&w| w >= 2 && 2 * w <= n)
        .collect();
    out.dedup();
    out
}

pub fn brute_force(n: usize, scales: &[usize], s: usize, e: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    for &w in scales {
        for l in 1..=n {
            if l + w <= n && s <= l && l + w - 1 <= e {
                out.push(Candidate { l, w });
            }
        }
    }
    out
}

/// Residual sum of squares from the normal equations in centred, scaled
/// coordinates, solved by Gaussian elimination with partial pivoting.
pub fn normal_equations_rss(y: &[f64], start: usize, p: usize) -> (f64, Vec<f64>) {
    let m = y.len();
    let q = p + 1;
    let centre = start as f64 + (m as f64 - 1.0) / 2.0;
    let half = ((m as f64 - 1.0) / 2.0).max(1.0);
    let row = |i: usize| -> Vec<f64> {
        let u = (start as f64 + i as f64 - centre) / half;
        (0..q).map(|k| u.powi(k as i32)).collect()
    };
    let mut a = vec![vec![0.0; q + 1]; q];
    for (i, &yi) in y.iter().enumerate() {
        let x = row(i);
        for r in 0..q {
            for c in 0..q {
                a[r][c] += x[r] * x[c];
            }
            a[r][q] += x[r] * yi;
        }
    }
    for col in 0..q {
        let piv = (col..q)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in 0..q {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=q {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..q).map(|r| a[r][q] / a[r][r]).collect();
    let fitted: Vec<f64> = (0..m)
        .map(|i| row(i).iter().zip(&beta).map(|(x, b)| x * b).sum())
        .collect();
    let rss = y.iter().zip(&fitted).map(|(v, f)| (v - f).powi(2)).sum();
    (rss, fitted)
}
