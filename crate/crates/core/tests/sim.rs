// SPDX-License-Identifier: MIT OR Apache-2.0

use cpinfer::sim::{
    coverage_experiment, gen_noise, gen_signal, performance_experiment, replication_seed,
    Ar1Variance, CoverageSpec, ExperimentConfig, Method, NoiseKind, NoiseSpec,
    PerformanceSpec, RunOptions, SignalSpec,
};
use cpinfer::{detect, TimeSeries};

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

fn lag1(v: &[f64]) -> f64 {
    let (m, var) = mean_var(v);
    let c: f64 = v.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    c / ((v.len() - 1) as f64 * var)
}

const N: usize = 100_000;

#[test]
fn iid_noise_has_unit_variance() {
    for (kind, se) in [(NoiseKind::N1, (2.0 / N as f64).sqrt()), (NoiseKind::N2, (8.0 / N as f64).sqrt())] {
        let z = gen_noise(&NoiseSpec::new(kind, 1.0, 17), N).unwrap();
        let (m, v) = mean_var(&z);
        assert!(m.abs() < 4.0 / (N as f64).sqrt(), "{kind} mean {m}");
        assert!((v - 1.0).abs() < 3.0 * se, "{kind} variance {v}");
        assert!(lag1(&z).abs() < 4.0 / (N as f64).sqrt());
    }
    let z = gen_noise(&NoiseSpec::new(NoiseKind::N1, 1.0, 18), N).unwrap();
    let v = mean_var(&z).1;
    assert!((0.97..=1.03).contains(&v));
}

#[test]
fn ar_noise_has_the_target_autocorrelation() {
    for kind in [NoiseKind::N3, NoiseKind::N4] {
        let z = gen_noise(&NoiseSpec::new(kind, 1.0, 23), N).unwrap();
        let r = lag1(&z);
        let se = ((1.0 - 0.25) / N as f64).sqrt();
        assert!((r - 0.5).abs() < 3.0 * se + 0.002, "{kind} lag-1 {r}");
    }
}

#[test]
fn ar_variance_conventions() {
    let se = (2.0 * 1.25 / 0.75 / N as f64).sqrt();
    let stationary = NoiseSpec {
        ar1_variance: Ar1Variance::Stationary,
        ..NoiseSpec::new(NoiseKind::N3, 1.0, 5)
    };
    let v = mean_var(&gen_noise(&stationary, N).unwrap()).1;
    assert!((v - 1.0).abs() < 4.0 * se, "stationary {v}");
    let inflated = NoiseSpec::new(NoiseKind::N3, 1.0, 5);
    let v = mean_var(&gen_noise(&inflated, N).unwrap()).1;
    let target = 1.0 / 0.75f64.powi(2);
    assert!((v / target - 1.0).abs() < 4.0 * se, "inflated {v}");
    assert!((inflated.long_run_sd() - 2.0 / 0.75f64.sqrt()).abs() < 1e-12);
    assert!((stationary.long_run_sd() - 0.75f64.sqrt() / 0.5).abs() < 1e-12);
}

#[test]
fn noise_is_reproducible() {
    for kind in NoiseKind::ALL {
        let a = gen_noise(&NoiseSpec::new(kind, 2.0, 99), 1000).unwrap();
        let b = gen_noise(&NoiseSpec::new(kind, 2.0, 99), 1000).unwrap();
        let c = gen_noise(&NoiseSpec::new(kind, 2.0, 100), 1000).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
    assert_ne!(replication_seed(1, 2, 3), replication_seed(1, 2, 4));
    assert_ne!(replication_seed(1, 2, 3), replication_seed(1, 3, 3));
}

#[test]
fn performance_metrics_match_a_direct_recount() {
    let signal = SignalSpec::blocks();
    let spec = PerformanceSpec {
        signal: signal.clone(),
        sigma: 10.0,
        sigma_by_noise: Default::default(),
        alpha: 0.1,
        reps: 12,
        methods: vec![Method::Dif1Mad, Method::Dif2Lrv],
        noise: vec![NoiseKind::N1, NoiseKind::N3],
        degree: None,
        seed: 77,
        ar1_variance: Ar1Variance::Inflated,
        lambda_override: None,
    };
    let report = performance_experiment(&spec, RunOptions { threads: Some(2) }).unwrap();
    let mean = gen_signal(&signal).unwrap();
    let n = signal.n;
    for kind in [NoiseKind::N1, NoiseKind::N3] {
        for method in [Method::Dif1Mad, Method::Dif2Lrv] {
            let (mut covered, mut genuine, mut prop, mut length, mut nonempty) = (0, 0, 0.0, 0.0, 0);
            for rep in 0..spec.reps as u64 {
                let seed = replication_seed(77, kind.code() << 40 | n as u64, rep);
                let z = gen_noise(&NoiseSpec::new(kind, 10.0, seed), n).unwrap();
                let y: Vec<f64> = mean.values().iter().zip(z).map(|(f, e)| f + e).collect();
                let res = detect(&TimeSeries::new(y).unwrap(), &method.config(0, 0.1)).unwrap();
                let g = res
                    .intervals
                    .iter()
                    .filter(|iv| signal.change_points.iter().any(|&c| iv.contains(c)))
                    .count();
                genuine += g;
                if g == res.intervals.len() {
                    covered += 1;
                }
                if res.intervals.is_empty() {
                    prop += 1.0;
                } else {
                    nonempty += 1;
                    prop += g as f64 / res.intervals.len() as f64;
                    length += res.intervals.iter().map(|iv| iv.width).sum::<usize>() as f64
                        / res.intervals.len() as f64;
                }
            }
            let row = report.row(method, kind, 0).unwrap();
            let reps = spec.reps as f64;
            assert!((row.coverage - covered as f64 / reps).abs() < 1e-12);
            assert!((row.no_genuine.unwrap() - genuine as f64 / reps).abs() < 1e-12);
            assert!((row.prop_genuine.unwrap() - prop / reps).abs() < 1e-12);
            if nonempty > 0 {
                assert!((row.mean_length.unwrap() - length / nonempty as f64).abs() < 1e-9);
            }
            assert!(row.coverage >= 0.0 && row.coverage <= 1.0);
            assert!(row.prop_genuine.unwrap() <= 1.0);
        }
    }
}

#[test]
fn coverage_report_is_deterministic_and_thread_invariant() {
    let spec = CoverageSpec {
        n: 300,
        alpha: 0.1,
        reps: 40,
        methods: Method::ALL.to_vec(),
        noise: vec![NoiseKind::N1, NoiseKind::N3],
        degrees: vec![0, 1],
        seed: 3,
        ar1_variance: Ar1Variance::Inflated,
        lambda_override: None,
    };
    let a = coverage_experiment(&spec, RunOptions { threads: Some(1) }).unwrap();
    let b = coverage_experiment(&spec, RunOptions { threads: Some(3) }).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.rows.len(), 12);
    for r in &a.rows {
        assert!((r.coverage - r.empty as f64 / 40.0).abs() < 1e-12);
    }
}

#[test]
fn config_files_drive_experiments() {
    let cfg = ExperimentConfig::from_toml(
        r#"
        kind = "performance"
        reps = 4
        seed = 2
        methods = ["DIF1-MAD"]
        noise = ["N1"]
        sigma = 1.0
        [signal]
        kind = "hills"
        "#,
    )
    .unwrap();
    let reports = cfg.run(RunOptions::default()).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].change_points, vec![100, 200, 300]);
    assert!(reports[0].to_csv().lines().count() == 2);
    assert!(ExperimentConfig::from_toml("kind = \"coverage\"\nreps = 1\nmethods = []\nnoise = []\nbogus = 1").is_err());
}

#[test]
fn null_family_wise_error() {
    let run = |methods: Vec<Method>, noise: NoiseKind| {
        let spec = CoverageSpec {
            n: 750,
            alpha: 0.1,
            reps: 2000,
            methods,
            noise: vec![noise],
            degrees: vec![0, 1, 2],
            seed: 11,
            ar1_variance: Ar1Variance::Inflated,
            lambda_override: None,
        };
        coverage_experiment(&spec, RunOptions::default()).unwrap()
    };
    let iid = run(vec![Method::Dif1Mad, Method::Dif2Sd, Method::Dif2Lrv], NoiseKind::N1);
    let dep = run(vec![Method::Dif2Lrv], NoiseKind::N3);
    for row in iid.rows.iter().chain(&dep.rows) {
        let rate = 1.0 - row.coverage;
        assert!(rate <= 0.14, "{} {} p = {}: {rate}", row.method, row.noise, row.degree);
    }
}
