use heavyperm::matrixgen::{extract, generate, LogMatrix, SubmatrixSelector};
use heavyperm::numerics::ln_factorial;
use heavyperm::permcore::*;
use heavyperm::{DistSpec, SeedSpec};
use proptest::prelude::*;

fn dists() -> Vec<DistSpec> {
    vec![DistSpec::pareto(0.5).unwrap(), DistSpec::pareto(2.0).unwrap(), DistSpec::ExpRate1]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn ryser_matches_brute_on_random_squares() {
    let mut count = 0;
    for (d_idx, d) in dists().iter().enumerate() {
        for t in 0..70u64 {
            let n = 1 + (t % 7) as usize;
            let a = generate(n, n, d, SeedSpec::new(100 + d_idx as u64, t)).unwrap();
            let want = perm_brute(&a).unwrap().log_perm.ln();
            let got = perm_ryser(&a).unwrap().log_perm.ln();
            assert!(close(got, want, 1e-9), "{d} n={n} t={t}: {got} vs {want}");
            count += 1;
        }
    }
    assert!(count >= 200);
}

#[test]
fn dp_matches_ryser_up_to_twelve() {
    for t in 0..50u64 {
        let n = 2 + (t % 11) as usize;
        let d = &dists()[(t % 3) as usize];
        let a = generate(n, n, d, SeedSpec::new(7, t)).unwrap();
        let r = perm_ryser(&a).unwrap().log_perm.ln();
        let p = perm_dp(&a).unwrap().log_perm.ln();
        assert!(close(r, p, 1e-9), "n={n}: {r} vs {p}");
    }
}

#[test]
fn ryser_and_dp_agree_at_twenty() {
    for (i, d) in dists().iter().enumerate() {
        let a = generate(20, 20, d, SeedSpec::new(21, i as u64)).unwrap();
        let r = perm_ryser(&a).unwrap().log_perm.ln();
        let p = perm_dp(&a).unwrap().log_perm.ln();
        assert!(close(r, p, 1e-9), "{d}: {r} vs {p}");
    }
}

#[test]
fn ryser_all_ones_to_ceiling() {
    let a = LogMatrix::from_log_entries(24, 24, vec![0.0; 576]).unwrap();
    let got = perm_ryser(&a).unwrap().log_perm.ln();
    assert!(close(got, ln_factorial(24), 1e-9), "{got}");
}

#[test]
fn dp_matches_brute_rectangular() {
    for (d_idx, d) in dists().iter().enumerate() {
        for m in 1..=7usize {
            for n in m..=9usize {
                let a = generate(m, n, d, SeedSpec::new(300 + d_idx as u64, (m * 10 + n) as u64)).unwrap();
                let want = perm_brute(&a).unwrap().log_perm.ln();
                let got = perm_dp(&a).unwrap().log_perm.ln();
                assert!(close(got, want, 1e-9), "{d} {m}x{n}");
            }
        }
    }
}

#[test]
fn binary_matrices_with_zero_permanent() {
    // Two rows confined to one column.
    let ninf = f64::NEG_INFINITY;
    let a = LogMatrix::from_log_rows(&[vec![0.0, ninf, ninf], vec![0.0, ninf, ninf], vec![0.0, 0.0, 0.0]]).unwrap();
    for r in [perm_brute(&a), perm_ryser(&a), perm_dp(&a)] {
        assert!(r.unwrap().log_perm.is_zero());
    }
    let s = perm_sis(&a, 100, SeedSpec::new(1, 0)).unwrap();
    assert!(s.log_perm.is_zero());
}

#[test]
fn sis_within_three_standard_errors() {
    let a = generate(5, 5, &DistSpec::pareto(0.5).unwrap(), SeedSpec::new(17, 0)).unwrap();
    let exact = perm_ryser(&a).unwrap().log_perm.ln();
    let r = perm_sis(&a, 100_000, SeedSpec::new(17, 1)).unwrap();
    let se = r.est_stderr_log.unwrap();
    assert!((r.log_perm.ln() - exact).abs() <= 3.0 * se, "{} vs {exact} (se {se})", r.log_perm.ln());
}

#[test]
fn sis_rectangular_is_unbiased_in_aggregate() {
    let a = generate(3, 6, &DistSpec::ExpRate1, SeedSpec::new(4, 0)).unwrap();
    let exact = perm_brute(&a).unwrap().log_perm.ln();
    let r = perm_sis(&a, 200_000, SeedSpec::new(4, 9)).unwrap();
    assert!((r.log_perm.ln() - exact).abs() <= 4.0 * r.est_stderr_log.unwrap());
}

#[test]
fn assignment_matches_enumeration() {
    for t in 0..60u64 {
        let n = 1 + (t % 7) as usize;
        let a = generate(n, n, &dists()[(t % 3) as usize], SeedSpec::new(55, t)).unwrap();
        let got = max_weight_assignment(&a);
        let mut best = f64::NEG_INFINITY;
        let mut perm: Vec<usize> = (0..n).collect();
        permute_all(&mut perm, 0, &mut |p| {
            let s: f64 = p.iter().enumerate().map(|(i, &j)| a.log_entry(i, j)).sum();
            best = best.max(s);
        });
        assert!(close(got.log_value, best, 1e-12), "n={n}");
        for i in 0..n {
            for j in 0..n {
                assert!(a.log_entry(i, j) <= got.row_pot[i] + got.col_pot[j] + 1e-9);
            }
        }
    }
}

fn permute_all(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute_all(p, k + 1, f);
        p.swap(k, i);
    }
}

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = LogMatrix> {
    (1..=max_rows, 0..=max_cols - 1).prop_flat_map(move |(m, extra)| {
        let n = (m + extra).min(max_cols).max(m);
        prop::collection::vec(-6.0f64..6.0, m * n)
            .prop_map(move |e| LogMatrix::from_log_entries(m, n, e).unwrap())
    })
}

fn square_strategy(max_n: usize) -> impl Strategy<Value = LogMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-6.0f64..6.0, n * n).prop_map(move |e| LogMatrix::from_log_entries(n, n, e).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_identity(a in matrix_strategy(6, 8), log_lambda in -20.0f64..20.0) {
        let m = a.rows() as f64;
        let b = a.scaled(log_lambda);
        let pairs = [
            (perm_brute(&a).unwrap(), perm_brute(&b).unwrap()),
            (perm_dp(&a).unwrap(), perm_dp(&b).unwrap()),
        ];
        for (x, y) in pairs {
            prop_assert!((y.log_perm.ln() - m * log_lambda - x.log_perm.ln()).abs() <= 1e-9 * y.log_perm.ln().abs().max(1.0));
        }
        if a.is_square() {
            let x = perm_ryser(&a).unwrap().log_perm.ln();
            let y = perm_ryser(&b).unwrap().log_perm.ln();
            prop_assert!((y - m * log_lambda - x).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }

    #[test]
    fn permutation_invariance(a in square_strategy(8), seed in any::<u64>()) {
        let n = a.rows();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let s = SeedSpec::new(seed, 0);
            rows.swap(i, (heavyperm::randsrc::uniform01(s, 0, i as u64) * (i + 1) as f64) as usize);
            cols.swap(i, (heavyperm::randsrc::uniform01(s, 1, i as u64) * (i + 1) as f64) as usize);
        }
        let b = a.permuted(&rows, &cols);
        let x = perm_ryser(&a).unwrap().log_perm.ln();
        let y = perm_ryser(&b).unwrap().log_perm.ln();
        prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        let p = perm_dp(&b).unwrap().log_perm.ln();
        prop_assert!((x - p).abs() <= 1e-9 * x.abs().max(1.0));
    }

    #[test]
    fn block_lower_bound(a in square_strategy(10), split in 1usize..10) {
        let n = a.rows();
        prop_assume!(n >= 2);
        let k = split.min(n - 1);
        let head: Vec<usize> = (0..k).collect();
        let tail: Vec<usize> = (k..n).collect();
        let b = extract(&a, &SubmatrixSelector::new(head.clone(), head).unwrap()).unwrap();
        let c = extract(&a, &SubmatrixSelector::new(tail.clone(), tail).unwrap()).unwrap();
        let whole = perm_ryser(&a).unwrap().log_perm.ln();
        let parts = perm_ryser(&b).unwrap().log_perm.ln() + perm_ryser(&c).unwrap().log_perm.ln();
        prop_assert!(whole >= parts - 1e-9 * whole.abs().max(1.0));
    }

    #[test]
    fn strictly_monotone_in_each_entry(a in square_strategy(7), cell in any::<(usize, usize)>(), bump in 0.01f64..3.0) {
        let n = a.rows();
        let (i, j) = (cell.0 % n, cell.1 % n);
        let b = a.with_entry(i, j, a.log_entry(i, j) + bump);
        prop_assert!(perm_brute(&b).unwrap().log_perm > perm_brute(&a).unwrap().log_perm);
        prop_assert!(perm_ryser(&b).unwrap().log_perm > perm_ryser(&a).unwrap().log_perm);
        prop_assert!(perm_dp(&b).unwrap().log_perm > perm_dp(&a).unwrap().log_perm);
    }

    #[test]
    fn sis_scaling_is_exact_per_path(a in matrix_strategy(5, 7), log_lambda in -10.0f64..10.0, seed in any::<u64>()) {
        let s = SeedSpec::new(seed, 0);
        let x = perm_sis(&a, 64, s).unwrap().log_perm.ln();
        let y = perm_sis(&a.scaled(log_lambda), 64, s).unwrap().log_perm.ln();
        prop_assert!((y - a.rows() as f64 * log_lambda - x).abs() <= 1e-9 * y.abs().max(1.0));
    }
}
