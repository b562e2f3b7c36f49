//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p xisis --test acceptance -- --nocapture --test-threads 1`
//! to see them in order.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xisis::baselines::PointBiserialParts;
use xisis::evalkit::f_measure;
use xisis::rankcorr::{xi_binary_score, xi_population_discrete, xi_score, DiscreteJoint};
use xisis::screening::{
    score_all, threshold_select, top_d, DataMatrix, Method, ResponseKind, ScoreVector,
};
use xisis::simgen::{
    concentration_experiment, run_simulation, ConcentrationConfig, ModelId, ModelSpec,
    SimulationConfig,
};
use xisis::Sample;

fn report(id: u32, title: &str, pass: bool, elapsed: Duration, detail: &str) {
    println!(
        "[{}] AC{id} {title} ({:.2}s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
}

#[test]
fn ac1_exact_closed_form() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for n in [4usize, 10, 100, 1000] {
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 0.01).exp()).collect();
        let got = xi_score(&Sample::new(&x, &y).unwrap(), 0).unwrap();
        let want = 1.0 - 3.0 / (n as f64 + 1.0);
        pass &= got == want;
        detail.push_str(&format!("n={n}: {got} vs {want}; "));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    report(1, "exact estimator values", pass, elapsed, &detail);
    assert!(pass, "{detail}");
}

/// Five joints with population values frozen from exact rational enumeration.
fn fixtures() -> Vec<(&'static str, DiscreteJoint, f64)> {
    let third = 1.0 / 3.0;
    vec![
        (
            "independent",
            DiscreteJoint::independent(
                vec![0., 1., 2.],
                &[0.2, 0.5, 0.3],
                vec![0., 1., 2.],
                &[0.1, 0.6, 0.3],
            )
            .unwrap(),
            0.0,
        ),
        (
            "deterministic",
            DiscreteJoint::new(
                vec![0., 1., 2.],
                vec![0., 1., 2.],
                vec![
                    vec![third, 0., 0.],
                    vec![0., third, 0.],
                    vec![0., 0., third],
                ],
            )
            .unwrap(),
            1.0,
        ),
        (
            "2x2",
            DiscreteJoint::new(
                vec![0., 1.],
                vec![0., 1.],
                vec![vec![0.4, 0.1], vec![0.1, 0.4]],
            )
            .unwrap(),
            9.0 / 25.0,
        ),
        (
            "3x3",
            DiscreteJoint::new(
                vec![0., 1., 2.],
                vec![0., 1., 2.],
                vec![
                    vec![0.20, 0.05, 0.05],
                    vec![0.05, 0.10, 0.15],
                    vec![0.10, 0.05, 0.25],
                ],
            )
            .unwrap(),
            245.0 / 1506.0,
        ),
        (
            "4x3 u-shape",
            DiscreteJoint::new(
                vec![-1.5, -0.5, 0.5, 1.5],
                vec![0., 1., 2.],
                vec![
                    vec![0.02, 0.05, 0.18],
                    vec![0.15, 0.08, 0.02],
                    vec![0.16, 0.07, 0.02],
                    vec![0.03, 0.04, 0.18],
                ],
            )
            .unwrap(),
            895.0 / 2364.0,
        ),
    ]
}

#[test]
fn ac2_population_oracle_vs_monte_carlo() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (i, (name, joint, frozen)) in fixtures().into_iter().enumerate() {
        let population = xi_population_discrete(&joint).unwrap();
        let (x, y) = joint.sample(20_000, 1000 + i as u64);
        let estimate = xi_score(&Sample::new(&x, &y).unwrap(), 77 + i as u64).unwrap();
        let ok = (population - frozen).abs() < 1e-12 && (estimate - population).abs() <= 0.02;
        pass &= ok;
        detail.push_str(&format!("{name}: pop={population:.5} mc={estimate:.5}; "));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    report(2, "oracle equivalence", pass, elapsed, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn ac3_binary_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(5..200);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..2) as f64).collect();
        let sample = Sample::new(&x, &y).unwrap();
        let Ok(parts) = PointBiserialParts::from_sample(&sample) else {
            continue;
        };
        let rpb = parts.coefficient();
        if rpb == 0.0 {
            continue;
        }
        let lhs = xi_binary_score(&sample).unwrap();
        let rhs = (parts.mean1 - parts.mean0).powi(2) / (rpb * rpb);
        worst = worst.max((lhs - rhs).abs());
        checked += 1;
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-10 && elapsed < Duration::from_secs(1);
    report(3, "binary identity", pass, elapsed, &format!("max |diff| = {worst:e}"));
    assert!(pass);
}

fn desk_run(id: ModelId, seed: u64) -> (xisis::simgen::SimulationReport, Duration) {
    let config = SimulationConfig::desk(id, 400, seed).unwrap();
    assert_eq!(config.d, 66);
    assert_eq!((config.p, config.replications), (200, 100));
    let start = Instant::now();
    let report = run_simulation(&config).unwrap();
    (report, start.elapsed())
}

fn describe(report: &xisis::simgen::SimulationReport) -> String {
    report
        .methods
        .iter()
        .map(|m| format!("{}={:?}", m.method, m.proportions))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn ac4_scaled_table_m1() {
    let (report, elapsed) = desk_run(ModelId::M1, 401);
    let xi = report.proportions(Method::Xi).unwrap();
    let pearson = report.proportions(Method::Pearson).unwrap();
    let dcor = report.proportions(Method::Dcor).unwrap();
    let pass = xi.iter().all(|&v| v >= 0.98)
        && pearson[2] <= 0.10
        && dcor[2] <= 0.40
        && elapsed < Duration::from_secs(300);
    report_line(4, "scaled M1 table", pass, elapsed, &report);
    assert!(pass);
}

#[test]
fn ac5_scaled_table_m4() {
    let (report, elapsed) = desk_run(ModelId::M4, 404);
    let xi = report.proportions(Method::Xi).unwrap();
    let dcor = report.proportions(Method::Dcor).unwrap();
    let pass = xi.iter().all(|&v| v >= 0.90) && dcor[1] <= 0.30 && elapsed < Duration::from_secs(300);
    report_line(5, "scaled M4 table (binary)", pass, elapsed, &report);
    assert!(pass);
}

#[test]
fn ac6_scaled_table_m3() {
    let (report, elapsed) = desk_run(ModelId::M3, 403);
    let xi = report.proportions(Method::Xi).unwrap();
    let pearson = report.proportions(Method::Pearson).unwrap();
    let pass = xi.iter().all(|&v| v >= 0.85)
        && pearson.iter().all(|&v| v <= 0.05)
        && elapsed < Duration::from_secs(300);
    report_line(6, "scaled M3 table (Cauchy noise)", pass, elapsed, &report);
    assert!(pass);
}

fn report_line(
    id: u32,
    title: &str,
    pass: bool,
    elapsed: Duration,
    report: &xisis::simgen::SimulationReport,
) {
    self::report(id, title, pass, elapsed, &describe(report));
}

#[test]
fn ac7_concentration_direction() {
    let config = ConcentrationConfig {
        model: ModelSpec::new(ModelId::Independent),
        n_grid: vec![100, 200, 400, 800],
        p: 200,
        replications: 200,
        delta: 0.15,
        rho: 0.5,
        seed: 7,
    };
    let start = Instant::now();
    let out = concentration_experiment(&config).unwrap();
    let elapsed = start.elapsed();
    let freq: Vec<f64> = out.tails.iter().map(|t| t.frequency).collect();
    let pass = freq.windows(2).all(|w| w[1] <= w[0])
        && freq[3] <= 0.05
        && elapsed < Duration::from_secs(120);
    report(7, "concentration direction", pass, elapsed, &format!("tail freq {freq:?}"));
    assert!(pass);
}

#[test]
fn ac8_metric_formulas() {
    let start = Instant::now();
    let a = f_measure(0.950, 0.950);
    let b = f_measure(0.850, 0.944);
    let pass = (a - 0.950).abs() <= 0.001 && (b - 0.895).abs() <= 0.001;
    report(8, "metric formulas", pass, start.elapsed(), &format!("F={a:.4}, F={b:.4}"));
    assert!(pass);
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    })
}

fn distinct(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::hash_set(-1_000_000i64..1_000_000, len)
        .prop_map(|s| s.into_iter().map(|v| v as f64 / 1000.0).collect())
}

fn sv(scores: Vec<f64>) -> ScoreVector {
    ScoreVector {
        scores,
        method: Method::Xi,
        tie_seed: 0,
        warnings: vec![],
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn ac9_property_suites() {
    let start = Instant::now();
    let mut outcomes: Vec<(&str, Result<(), String>)> = Vec::new();

    // Strictly increasing transforms of x or y leave the estimate unchanged.
    let r = runner().run(
        &(
            prop::collection::vec((-8i32..8, -8i32..8), 2..80),
            any::<u64>(),
        ),
        |(pairs, seed)| {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let Ok(base) = xi_score(&Sample::new(&x, &y).unwrap(), seed) else {
                return Ok(());
            };
            let gx: Vec<f64> = x.iter().map(|v| (v / 3.0).exp() * 5.0 - 2.0).collect();
            let hy: Vec<f64> = y.iter().map(|v| v.powi(3) + v).collect();
            prop_assert_eq!(xi_score(&Sample::new(&gx, &y).unwrap(), seed).unwrap(), base);
            prop_assert_eq!(xi_score(&Sample::new(&x, &hy).unwrap(), seed).unwrap(), base);
            Ok(())
        },
    );
    outcomes.push(("monotone invariance", r.map_err(|e| e.to_string())));

    // Jointly permuting pairs does not matter when x has no ties.
    let r = runner().run(
        &(distinct(2..80), any::<u64>(), any::<u64>()),
        |(x, yseed, perm_seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(yseed);
            let y: Vec<f64> = x.iter().map(|_| rng.random_range(0..5) as f64).collect();
            let Ok(base) = xi_score(&Sample::new(&x, &y).unwrap(), 0) else {
                return Ok(());
            };
            let mut idx: Vec<usize> = (0..x.len()).collect();
            let mut prng = ChaCha8Rng::seed_from_u64(perm_seed);
            for i in (1..idx.len()).rev() {
                idx.swap(i, prng.random_range(0..=i));
            }
            let px: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let py: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            prop_assert_eq!(xi_score(&Sample::new(&px, &py).unwrap(), 0).unwrap(), base);
            Ok(())
        },
    );
    outcomes.push(("pair-permutation invariance", r.map_err(|e| e.to_string())));

    // Selection: containment in d, monotonicity in c, order invariance.
    let r = runner().run(
        &(
            prop::collection::vec(-1.0f64..1.0, 1..60),
            1usize..70,
            1usize..70,
            0.01f64..2.0,
            0.01f64..2.0,
            0.01f64..0.49,
        ),
        |(scores, d1, d2, c1, c2, kappa)| {
            let (d1, d2) = (d1.min(d2), d1.max(d2));
            let s = sv(scores.clone());
            let small = top_d(&s, d1).unwrap();
            let large = top_d(&s, d2).unwrap();
            prop_assert_eq!(small.selected.len(), d1.min(scores.len()));
            prop_assert!(small.selected.iter().all(|k| large.is_selected(*k)));

            let (c1, c2) = (c1.min(c2), c1.max(c2));
            let loose = threshold_select(&s, c1, kappa, 400).unwrap();
            let strict = threshold_select(&s, c2, kappa, 400).unwrap();
            prop_assert!(strict.selected.iter().all(|k| loose.is_selected(*k)));

            let transformed = sv(scores.iter().map(|v| (3.0 * v).exp() + 1.0).collect());
            prop_assert_eq!(&top_d(&transformed, d1).unwrap().ranking, &small.ranking);
            prop_assert_eq!(top_d(&transformed, d1).unwrap().selected, small.selected);
            Ok(())
        },
    );
    outcomes.push(("selection containment/monotonicity", r.map_err(|e| e.to_string())));

    // Same seed, same scores, whatever the pool size; ties in x included.
    let r = runner().run(
        &(2usize..40, 1usize..12, any::<u64>(), any::<u64>()),
        |(n, p, data_seed, tie_seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
            let columns: Vec<Vec<f64>> = (0..p)
                .map(|_| (0..n).map(|_| rng.random_range(0..6) as f64).collect())
                .collect();
            let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            y[0] = 2.0;
            let data =
                DataMatrix::from_column_vecs(columns, y, ResponseKind::Continuous, None).unwrap();
            let one = in_pool(1, || score_all(&data, Method::Xi, tie_seed).unwrap());
            let four = in_pool(4, || score_all(&data, Method::Xi, tie_seed).unwrap());
            let again = in_pool(3, || score_all(&data, Method::Xi, tie_seed).unwrap());
            prop_assert_eq!(&one.scores, &four.scores);
            prop_assert_eq!(&one.scores, &again.scores);
            Ok(())
        },
    );
    outcomes.push(("seed/thread-count determinism", r.map_err(|e| e.to_string())));

    // Whole simulation reports are identical across pool sizes.
    let config = SimulationConfig {
        p: 40,
        replications: 12,
        ..SimulationConfig::desk(ModelId::M1, 80, 5).unwrap()
    };
    let a = in_pool(1, || run_simulation(&config).unwrap());
    let b = in_pool(4, || run_simulation(&config).unwrap());
    let same = a
        .methods
        .iter()
        .zip(&b.methods)
        .all(|(x, y)| x.proportions == y.proportions);
    outcomes.push((
        "simulation determinism",
        if same { Ok(()) } else { Err("reports differ".into()) },
    ));

    let elapsed = start.elapsed();
    let mut pass = elapsed < Duration::from_secs(30);
    let mut detail = String::new();
    for (name, r) in &outcomes {
        pass &= r.is_ok();
        detail.push_str(&format!(
            "{name}: {}; ",
            match r {
                Ok(()) => "ok".to_string(),
                Err(e) => e.clone(),
            }
        ));
    }
    report(9, "property suites (1000 cases each)", pass, elapsed, &detail);
    assert!(pass, "{detail}");
}
