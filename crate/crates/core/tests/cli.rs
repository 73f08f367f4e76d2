use std::path::Path;
use std::process::Command;

use heavyperm::harness::{matrix_seed, run_converge, ExperimentConfig};
use heavyperm::matrixgen::{generate, load};
use heavyperm::permcore::perm_ryser;
use heavyperm::{DistSpec, SeedSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heavyperm"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["perm", "--n", "3"]), 0);
    assert_eq!(exit_code(&["perm", "--n", "30"]), 3);
    assert_eq!(exit_code(&["perm", "--n", "8", "--engine", "brute"]), 3);
    assert_eq!(exit_code(&["converge", "--sizes", "8,30", "--policy", "exact-only"]), 3);
    assert_eq!(exit_code(&["converge", "--sizes", "8,8"]), 2);
    assert_eq!(exit_code(&["converge", "--dist", "pareto:beta=-1"]), 2);
    assert_eq!(exit_code(&["domcheck", "--dist", "exp1"]), 2);
    assert_eq!(exit_code(&["frobnicate"]), 2);
}

#[test]
fn gen_then_perm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.permmat.json");
    let p = path.to_str().unwrap();
    run_ok(&["gen", "--n", "6", "--m", "4", "--dist", "exp1", "--seed", "9", "--trial", "2", "--out", p]);
    let a = load(&path).unwrap();
    assert_eq!(a, generate(4, 6, &DistSpec::ExpRate1, SeedSpec::new(9, 2)).unwrap());
    let out = run_ok(&["perm", "--input", p]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["engine"], "dp");
    let brute = run_ok(&["perm", "--input", p, "--engine", "brute"]);
    let w: serde_json::Value = serde_json::from_str(&brute).unwrap();
    let (x, y) = (v["log_perm"].as_f64().unwrap(), w["log_perm"].as_f64().unwrap());
    assert!((x - y).abs() < 1e-9 * x.abs().max(1.0));
}

#[test]
fn estimate_and_certify_output() {
    let est: serde_json::Value = serde_json::from_str(&run_ok(&["estimate", "--n", "6", "--samples", "2000"])).unwrap();
    assert_eq!(est["engine"], "sis");
    assert!(est["est_stderr_log"].as_f64().unwrap() > 0.0);
    let cert: serde_json::Value = serde_json::from_str(&run_ok(&["certify", "--n", "30", "--rho", "0.3"])).unwrap();
    assert_eq!(cert["lower"]["side"], "lower");
    assert!(cert["lower"]["log_bound"].as_f64().unwrap() <= cert["upper"]["log_bound"].as_f64().unwrap());
}

#[test]
fn timestamp_line_only_without_deterministic() {
    let plain = run_ok(&["converge", "--sizes", "4", "--trials", "2"]);
    assert!(plain.starts_with("# generated"));
    let det = run_ok(&["converge", "--sizes", "4", "--trials", "2", "--deterministic"]);
    assert!(det.starts_with("n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target\n"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(&cfg, r#"{"kind": "converge", "dist": "exp1", "sizes": [4, 5], "trials": 3, "seed": 4}"#).unwrap();
    let out = run_ok(&["converge", "--config", cfg.to_str().unwrap(), "--trials", "2", "--deterministic"]);
    let rows: Vec<&str> = out.lines().skip(1).filter(|l| !l.contains("summary")).collect();
    assert_eq!(rows.len(), 4);
    assert!(out.lines().nth(1).unwrap().ends_with(",1"));
}

#[test]
fn csv_rows_regenerate_their_matrices() {
    let cfg = ExperimentConfig { sizes: vec![5, 7], trials: 3, seed: 21, ..Default::default() };
    let report = run_converge(&cfg).unwrap();
    for r in &report.records {
        assert_eq!(r.seed, matrix_seed(21, r.n));
        let a = generate(r.m, r.n, &cfg.dist, SeedSpec::new(r.seed, r.trial)).unwrap();
        assert_eq!(perm_ryser(&a).unwrap().log_perm.ln(), r.log_perm.unwrap());
        assert!(r.log_lower.unwrap() <= r.log_perm.unwrap() && r.log_perm.unwrap() <= r.log_upper.unwrap());
    }
}

#[test]
fn other_experiments_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (vec!["zstat".into(), "--sizes".into(), "3,4".into(), "--trials".into(), "20".into()], "n,k,trials,seed,mean_count"),
        (vec!["maxdiag".into(), "--sizes".into(), "50".into(), "--trials".into(), "500".into()], "n,trials,seed,t,p_le"),
        (vec!["tailcheck".into(), "--dist".into(), "pareto:beta=2".into(), "--grid".into(), "5".into()], "log_t,log_tail"),
        (vec!["scan".into(), "--sizes".into(), "6".into(), "--trials".into(), "2".into()], "n,trial,seed,alpha"),
        (vec!["domcheck".into(), "--grid".into(), "200".into()], "k_lo,k_hi,log_t"),
        (
            vec!["rect".into(), "--sizes".into(), "30,60".into(), "--trials".into(), "2".into(), "--height-c".into(), "1.2".into()],
            "n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target,condition",
        ),
    ];
    for (i, (mut args, header)) in cases.into_iter().enumerate() {
        let path = out(&format!("{i}.csv"));
        args.extend(["--deterministic".to_string(), "--out".to_string(), path.clone()]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        run_ok(&refs);
        let text = std::fs::read_to_string(Path::new(&path)).unwrap();
        assert!(text.starts_with(header), "{args:?}: {}", text.lines().next().unwrap_or(""));
        assert!(text.lines().count() > 1);
    }
}

#[test]
fn tailcheck_lattice_exponent_separates_scales() {
    let text = run_ok(&["tailcheck", "--dist", "lattice:lambda=1.5,c1=2,c2=3,s=2/5/11/23,kmax=25", "--grid", "50"]);
    let rows: Vec<Vec<String>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[3].is_empty()));
}
