// SPDX-License-Identifier: MIT OR Apache-2.0

use cpinfer::{
    build_grid, detect, diff_stat, greedy_interval_search, search_with, DetectionConfig,
    DetectionResult, DiffWeights, GridSpec, PrefixSums, Selection, TimeSeries,
};
use cpinfer::sim::{gen_noise, NoiseKind, NoiseSpec};
use proptest::prelude::*;

/// Direct recursive definition: scan every window in (width, location)
/// order, keep the first exceedance, recurse on both sides.
fn reference(
    ps: &PrefixSums,
    grid: &GridSpec,
    s: usize,
    e: usize,
    threshold: f64,
    weights: &DiffWeights,
    out: &mut Vec<(usize, usize)>,
) {
    let p = weights.degree();
    if e < s || e - s < grid.min_scale().min(p + 1) {
        return;
    }
    for c in grid.enumerate(s, e) {
        if c.w / weights.chunks() == 0 {
            continue;
        }
        if diff_stat(ps, c.l, c.w, weights).unwrap().abs() > threshold {
            out.push((c.l, c.end()));
            reference(ps, grid, s, c.l - 1, threshold, weights, out);
            reference(ps, grid, c.end() + 1, e, threshold, weights, out);
            return;
        }
    }
}

fn step_signal(n: usize, jumps: &[(usize, f64)], sigma: f64, seed: u64) -> Vec<f64> {
    let noise = gen_noise(&NoiseSpec::new(NoiseKind::N1, sigma, seed), n).unwrap();
    (1..=n)
        .zip(noise)
        .map(|(t, z)| {
            let level: f64 = jumps.iter().filter(|(c, _)| t > *c).map(|(_, h)| h).sum();
            level + z
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_recursive_reference(
        y in proptest::collection::vec(-3.0f64..3.0, 16..160),
        p in 0usize..=2,
        min_scale in 2usize..8,
        threshold in 0.3f64..3.0,
        dyadic in any::<bool>(),
    ) {
        let n = y.len();
        let a = if dyadic { 2.0 } else { 2f64.sqrt() };
        prop_assume!(n >= 2 * min_scale);
        let grid = build_grid(n, min_scale, a).unwrap();
        let ts = TimeSeries::new(y).unwrap();
        let ps = PrefixSums::new(&ts);
        let w = DiffWeights::new(p).unwrap();
        let got: Vec<(usize, usize)> = greedy_interval_search(&ps, &grid, 1, n, threshold, &w)
            .iter()
            .map(|iv| (iv.start, iv.end))
            .collect();
        let mut want = Vec::new();
        reference(&ps, &grid, 1, n, threshold, &w, &mut want);
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn intervals_are_disjoint_grid_windows(
        y in proptest::collection::vec(-3.0f64..3.0, 16..300),
        p in 0usize..=2,
        threshold in 0.2f64..2.0,
        argmax in any::<bool>(),
    ) {
        let n = y.len();
        let grid = build_grid(n, 4, 2f64.sqrt()).unwrap();
        let ts = TimeSeries::new(y).unwrap();
        let ps = PrefixSums::new(&ts);
        let w = DiffWeights::new(p).unwrap();
        let selection = if argmax { Selection::ScaleArgmax } else { Selection::FirstExceedance };
        let out = search_with(&ps, &grid, 1, n, threshold, &w, selection);
        prop_assert!(out.evaluations as usize <= grid.len());
        for iv in &out.intervals {
            prop_assert!(grid.contains_scale(iv.width));
            prop_assert_eq!(iv.end - iv.start + 1, iv.width);
            prop_assert!(iv.start >= 1 && iv.start <= n - iv.width);
            prop_assert!(iv.stat > threshold);
        }
        for pair in out.intervals.windows(2) {
            prop_assert!(pair[0].end < pair[1].start);
        }
    }

    #[test]
    fn top_level_detections_shrink_with_alpha(
        seed in 0u64..1000,
        p in 0usize..=1,
    ) {
        let n = 400;
        let y = step_signal(n, &[(100, 2.0), (250, -1.5)], 1.0, seed);
        let ts = TimeSeries::new(y).unwrap();
        let ps = PrefixSums::new(&ts);
        let w = DiffWeights::new(p).unwrap();
        let base = detect(&ts, &DetectionConfig::dif1_mad(p)).unwrap();
        let grid = build_grid(n, base.params.min_scale, base.params.decay).unwrap();
        let mut last_count = usize::MAX;
        let mut last_found = true;
        for alpha in [0.5, 0.2, 0.1, 0.05, 0.01] {
            let res = detect(&ts, &DetectionConfig::dif1_mad(p).with_alpha(alpha)).unwrap();
            let count = grid
                .enumerate(1, n)
                .filter(|c| diff_stat(&ps, c.l, c.w, &w).unwrap().abs() > res.threshold)
                .count();
            let found = !res.intervals.is_empty();
            prop_assert!(count <= last_count, "alpha {}: {} > {}", alpha, count, last_count);
            prop_assert!(last_found || !found);
            last_count = count;
            last_found = found;
        }
    }
}

#[test]
fn evaluations_bounded_by_grid() {
    for n in [100, 1000, 10_000] {
        let y = step_signal(n, &[(n / 3, 5.0), (2 * n / 3, -5.0)], 1.0, n as u64);
        let res = detect(&TimeSeries::new(y).unwrap(), &DetectionConfig::dif1_mad(0)).unwrap();
        assert!(res.evaluations as usize <= res.grid_size);
        assert!(!res.intervals.is_empty());
    }
}

#[test]
fn noiseless_steps_are_found_and_localised() {
    let n = 600;
    let jumps = [(150, 4.0), (300, -4.0), (450, 4.0)];
    let y = step_signal(n, &jumps, 0.5, 11);
    let res = detect(&TimeSeries::new(y).unwrap(), &DetectionConfig::dif1_mad(0)).unwrap();
    assert_eq!(res.intervals.len(), 3);
    for (iv, (c, _)) in res.intervals.iter().zip(jumps) {
        assert!(iv.contains(c) && iv.contains(c + 1));
        assert!(iv.eta_hat.abs_diff(c) <= 2, "{} vs {c}", iv.eta_hat);
    }
}

#[test]
fn kinks_need_degree_one() {
    let n = 800;
    let y: Vec<f64> = (1..=n)
        .map(|t| {
            let x = t as f64;
            let base = if t <= 400 { x } else { 800.0 - x };
            base * 0.05
        })
        .zip(gen_noise(&NoiseSpec::new(NoiseKind::N1, 0.2, 9), n).unwrap())
        .map(|(m, z)| m + z)
        .collect();
    let ts = TimeSeries::new(y).unwrap();
    let res = detect(&ts, &DetectionConfig::dif1_mad(1)).unwrap();
    assert_eq!(res.intervals.len(), 1);
    assert!(res.intervals[0].contains(400));
}

#[test]
fn result_round_trips_through_json() {
    let y = step_signal(300, &[(120, 3.0)], 1.0, 5);
    let res = detect(&TimeSeries::new(y).unwrap(), &DetectionConfig::dif2_lrv(0)).unwrap();
    let text = serde_json::to_string(&res).unwrap();
    let back: DetectionResult = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["lambda", "sigma_hat", "threshold", "intervals", "grid_size", "evaluations"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}
