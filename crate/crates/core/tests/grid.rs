// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use common::{brute_force, exact_scales};
use cpinfer::{build_grid, Candidate, CpError, GridSpec};

#[test]
fn enumeration_matches_brute_force_for_small_n() {
    let mut checked = 0usize;
    for (root, a) in [(true, std::f64::consts::SQRT_2), (false, 2.0)] {
        for min_scale in 2..=4 {
            for n in 2 * min_scale..=64 {
                let grid = build_grid(n, min_scale, a).unwrap();
                let scales = exact_scales(n, min_scale, root);
                assert_eq!(grid.scales(), &scales[..], "n = {n}, W = {min_scale}, a = {a}");
                assert_eq!(grid.len(), brute_force(n, &scales, 1, n).len());
                for s in 1..n {
                    for e in s + 1..=n {
                        let got: Vec<Candidate> = grid.enumerate(s, e).collect();
                        assert_eq!(got, brute_force(n, &scales, s, e), "n = {n}, [{s}, {e}]");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100_000);
}

#[test]
fn size_bounds() {
    for a in [1.1, std::f64::consts::SQRT_2, 2.0, 3.0] {
        for n in [20usize, 100, 1000, 10_000] {
            let grid = build_grid(n, 2, a).unwrap();
            let max_scales = ((n as f64).ln() / a.ln()).ceil() as usize;
            assert!(grid.scales().len() <= max_scales);
            assert!(grid.len() <= n * grid.scales().len());
            assert!(grid.scales().windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn documented_examples() {
    let grid = build_grid(20, 2, 2.0).unwrap();
    let sub: Vec<(usize, usize)> = grid.enumerate(5, 10).map(|c| (c.l, c.w)).collect();
    let mut expected: Vec<(usize, usize)> = (5..=9).map(|l| (l, 2)).collect();
    expected.extend([(5, 4), (6, 4), (7, 4)]);
    assert_eq!(sub, expected);

    let full: Vec<Candidate> = grid.enumerate(1, 20).collect();
    assert_eq!(full.len(), grid.len());
    assert!(grid.enumerate(5, 5).next().is_none());

    let root = build_grid(1024, 16, std::f64::consts::SQRT_2).unwrap();
    assert_eq!(root.scales(), &exact_scales(1024, 16, true)[..]);
}

#[test]
fn errors() {
    assert!(matches!(GridSpec::new(7, 4, 2.0), Err(CpError::EmptyScaleSet { .. })));
    assert!(matches!(GridSpec::new(100, 4, 1.0), Err(CpError::Parameter { .. })));
    assert!(matches!(GridSpec::new(100, 1, 2.0), Err(CpError::Parameter { .. })));
}
