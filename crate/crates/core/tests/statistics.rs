use heavyperm::asymstats::*;
use heavyperm::certify::greedy_pivots;
use heavyperm::matrixgen::{generate, LogMatrix};
use heavyperm::{DistSpec, SeedSpec};
use proptest::prelude::*;

#[test]
fn one_by_one_bins_follow_the_exponential_cdf() {
    let trials = 200_000u64;
    let h = z_histogram(1, trials, SeedSpec::new(5, 0)).unwrap();
    assert_eq!(h.total(), trials);
    for k in 1..=5u64 {
        let p = (-(k as f64 - 1.0)).exp() - (-(k as f64)).exp();
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((h.mean(k) - p).abs() <= 4.0 * se, "k={k}: {} vs {p}", h.mean(k));
    }
}

#[test]
fn seven_by_seven_bins_match_gamma_expectation() {
    let h = z_histogram(7, 2000, SeedSpec::new(77, 0)).unwrap();
    assert_eq!(h.total(), 2000 * 5040);
    for k in 1..=3u64 {
        let e = expected_z(7, k);
        assert!((h.mean(k) - e).abs() <= 4.0 * h.stderr(k), "k={k}: {} vs {e} (se {})", h.mean(k), h.stderr(k));
    }
}

#[test]
fn histogram_is_deterministic() {
    let a = z_histogram(5, 50, SeedSpec::new(1, 0)).unwrap();
    let b = z_histogram(5, 50, SeedSpec::new(1, 0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn max_diagnostic_against_bounds() {
    let trials = 20_000;
    let d = max_exp_diagnostic(100, trials, 1.5, SeedSpec::new(2, 0)).unwrap();
    let sigma = (0.1f64 * 0.9 / trials as f64).sqrt();
    assert!(d.p_ge <= d.bound_ge + 3.0 * sigma);
    assert!(d.mean_exp_r <= d.bound_mean_exp + 3.0 * d.stderr_exp_r);
    let low = max_exp_diagnostic(100, trials, 0.5, SeedSpec::new(2, 0)).unwrap();
    assert!(low.p_le <= 1e-3);
    assert!((low.bound_le - (-10f64).exp()).abs() < 1e-15);
}

#[test]
fn max_stats_are_nonnegative() {
    let s = max_stats(10, 1000, SeedSpec::new(3, 0)).unwrap();
    assert!(s.r_samples.iter().all(|&r| r >= 0.0));
    assert_eq!(s.r_samples.len(), 1000);
}

#[test]
fn max_perm_sum_dominates_greedy() {
    for t in 0..100u64 {
        let n = 2 + (t % 30) as usize;
        let a = generate(n, n, &DistSpec::pareto(1.5).unwrap(), SeedSpec::new(6, t)).unwrap();
        let greedy: f64 = greedy_pivots(&a, n).iter().map(|p| p.log_value).sum();
        assert!(max_perm_sum(&a).unwrap() >= greedy - 1e-9 * greedy.abs().max(1.0));
    }
}

#[test]
fn max_perm_sum_large_n() {
    let n = 400;
    let a = generate(n, n, &DistSpec::ExpRate1, SeedSpec::new(8, 0)).unwrap();
    let v = max_perm_sum(&a).unwrap();
    // Each row contributes at most its maximum.
    let cap: f64 = (0..n).map(|i| a.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max)).sum();
    assert!(v <= cap + 1e-9);
    assert!(v >= greedy_pivots(&a, n).iter().map(|p| p.log_value).sum::<f64>() - 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_perm_sum_shifts_with_scaling(entries in prop::collection::vec(-10.0f64..10.0, 36), n in 1usize..=6, c in -50.0f64..50.0) {
        let a = LogMatrix::from_log_entries(n, n, entries[..n * n].to_vec()).unwrap();
        let x = max_perm_sum(&a).unwrap();
        let y = max_perm_sum(&a.scaled(c)).unwrap();
        prop_assert!((y - n as f64 * c - x).abs() <= 1e-9 * y.abs().max(1.0));
    }

    #[test]
    fn incomplete_gamma_complements(a in 0.5f64..60.0, x in 0.01f64..150.0) {
        let p = gamma_p(a, x);
        let q = gamma_q(a, x);
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }
}
