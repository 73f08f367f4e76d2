//! Experiment configuration, orchestration and CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymstats::{expected_z, max_exp_diagnostic, z_histogram};
use crate::certify::{lower_certificate, submatrix_scan, tight_upper_certificate};
use crate::error::{Error, Result};
use crate::matrixgen::{generate, LogMatrix};
use crate::permcore::{dp_feasible, perm_brute, perm_dp, perm_ryser, perm_sis, Engine, BRUTE_MAX_COLS, BRUTE_MAX_ROWS, RYSER_MAX_N};
use crate::randsrc::{mix64, DistSpec, Lattice, SeedSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Converge,
    ConvergeRect,
    Zstat,
    Maxdiag,
    Tailcheck,
    Scan,
    Domcheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnginePolicy {
    /// Exact where the engines allow it, else SIS; certificates always.
    Auto,
    ExactOnly,
    CertifyOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub dist: DistSpec,
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub policy: EnginePolicy,
    /// Forces one engine for every row.
    pub engine: Option<Engine>,
    /// Fraction of rows taken greedily by the lower certificate.
    pub rho: f64,
    /// Certificate threshold; defaults to each matrix's lower-quartile entry.
    pub log_q: Option<f64>,
    /// Smallest submatrix size in the scan, as a fraction of `n`.
    pub alpha: f64,
    /// Constant of the rectangular height rule.
    pub height_c: f64,
    /// Fixed height overriding the rule.
    pub height: Option<usize>,
    /// SIS paths per estimate, or random selectors per size in the scan.
    pub samples: u64,
    /// Threshold `t` for the maxima diagnostic.
    pub t: f64,
    /// Exponent for the occupancy exceedance rate.
    pub gamma: f64,
    /// Grid points for `domcheck` and `tailcheck`.
    pub grid: usize,
    pub threads: Option<usize>,
    pub deterministic: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: Kind::Converge,
            dist: DistSpec::Pareto { beta: 2.0 },
            sizes: vec![8, 12, 16, 20, 24],
            trials: 20,
            seed: 0,
            policy: EnginePolicy::Auto,
            engine: None,
            rho: 0.5,
            log_q: None,
            alpha: 0.5,
            height_c: 1.2,
            height: None,
            samples: 1000,
            t: 1.5,
            gamma: 1.1,
            grid: 10_000,
            threads: None,
            deterministic: false,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let uses_sizes = !matches!(self.kind, Kind::Tailcheck | Kind::Domcheck);
        if uses_sizes {
            if self.sizes.is_empty() {
                return Err(Error::Config("sizes must not be empty".into()));
            }
            if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!("sizes must be strictly increasing, got {:?}", self.sizes)));
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.grid == 0 {
            return Err(Error::Config("grid must be at least 1".into()));
        }
        match self.kind {
            Kind::Converge | Kind::Scan if self.sizes.iter().any(|&n| n < 2) => {
                Err(Error::Config("sizes must be at least 2 (the ratio divides by ln n)".into()))
            }
            Kind::ConvergeRect if self.sizes.iter().any(|&n| n < 3) => {
                Err(Error::Config("rectangular sizes must be at least 3 (the height rule divides by ln ln n)".into()))
            }
            Kind::ConvergeRect if (self.height_c.is_nan() || self.height_c <= 1.0) && self.height.is_none() => {
                Err(Error::Config(format!("height constant must exceed 1, got {}", self.height_c)))
            }
            Kind::Maxdiag if self.sizes.iter().any(|&n| n < 3) => {
                Err(Error::Config("maxima diagnostic needs sizes >= 3".into()))
            }
            _ => Ok(()),
        }
    }

    /// Runs `f` on a pool of `threads` workers, or the global pool.
    pub fn with_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Seed recorded in CSV rows for size `n`: `generate(m, n, dist,
/// SeedSpec::new(matrix_seed(seed, n), trial))` rebuilds the row's matrix.
pub fn matrix_seed(seed: u64, n: usize) -> u64 {
    mix64(seed ^ mix64(n as u64 ^ 0x5349_5a45))
}

/// `ceil(c (ln n)^2 / ln ln n)`.
pub fn height_rule(n: usize, c: f64) -> usize {
    let ln_n = (n as f64).ln();
    (c * ln_n * ln_n / ln_n.ln()).ceil() as usize
}

/// `m ln ln n / (ln n)^2`; the rule needs this above 1.
pub fn height_condition(m: usize, n: usize) -> f64 {
    let ln_n = (n as f64).ln();
    m as f64 * ln_n.ln() / (ln_n * ln_n)
}

fn csv_num(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

/// Writes `body` to `path` (stdout when `None`), preceded by a timestamp
/// comment unless `deterministic`.
pub fn write_output(path: Option<&Path>, body: &str, deterministic: bool) -> Result<()> {
    let mut text = String::new();
    if !deterministic {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let _ = writeln!(text, "# generated unix={secs}");
    }
    text.push_str(body);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub m: usize,
    pub trial: u64,
    pub seed: u64,
    /// Engine name, or `certify` when only bounds were computed.
    pub engine: String,
    pub log_perm: Option<f64>,
    pub log_lower: Option<f64>,
    pub log_upper: Option<f64>,
    /// `log_perm / (m ln n)`, from the lower bound when no value exists.
    pub ratio: f64,
    pub target: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub target: Option<f64>,
    pub condition: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeReport {
    pub records: Vec<ConvergenceRecord>,
    pub summaries: Vec<SizeSummary>,
    pub rectangular: bool,
}

pub const CONVERGE_HEADER: &str = "n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target";

impl ConvergeReport {
    pub fn summary(&self, n: usize) -> Option<&SizeSummary> {
        self.summaries.iter().find(|s| s.n == n)
    }

    /// Trial rows for each size followed by `summary` rows whose `trial`
    /// cell names the statistic (`q25`, `median`, `q75`). Rectangular
    /// reports add the height-condition column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CONVERGE_HEADER);
        if self.rectangular {
            out.push_str(",condition");
        }
        out.push('\n');
        for s in &self.summaries {
            let cond = if self.rectangular { format!(",{}", csv_num(s.condition)) } else { String::new() };
            for r in self.records.iter().filter(|r| r.n == s.n) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}{}",
                    r.n,
                    r.m,
                    r.trial,
                    r.seed,
                    r.engine,
                    csv_num(r.log_perm),
                    csv_num(r.log_lower),
                    csv_num(r.log_upper),
                    r.ratio,
                    csv_num(r.target),
                    cond
                );
            }
            for (label, v) in [("q25", s.q25), ("median", s.median), ("q75", s.q75)] {
                let _ = writeln!(out, "{},{},{label},{},summary,,,,{v},{}{cond}", s.n, s.m, s.seed, csv_num(s.target));
            }
        }
        out
    }
}

/// Linear-interpolation quantile of sorted values.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Copy, Debug)]
struct Plan {
    exact: Option<Engine>,
    sis: bool,
    certs: bool,
}

fn exact_fits(engine: Engine, m: usize, n: usize) -> bool {
    match engine {
        Engine::Brute => m <= BRUTE_MAX_ROWS && n <= BRUTE_MAX_COLS,
        Engine::Ryser => m == n && n <= RYSER_MAX_N,
        Engine::Dp => dp_feasible(m, n),
        Engine::Sis => true,
    }
}

fn default_exact(m: usize, n: usize) -> Engine {
    if m == n && n <= RYSER_MAX_N {
        Engine::Ryser
    } else {
        Engine::Dp
    }
}

fn plan_for(cfg: &ExperimentConfig, m: usize, n: usize) -> Option<Plan> {
    let certs = cfg.policy != EnginePolicy::ExactOnly;
    match (cfg.engine, cfg.policy) {
        (_, EnginePolicy::CertifyOnly) => Some(Plan { exact: None, sis: false, certs: true }),
        (Some(Engine::Sis), _) => Some(Plan { exact: None, sis: true, certs }),
        (Some(e), _) => exact_fits(e, m, n).then_some(Plan { exact: Some(e), sis: false, certs }),
        (None, policy) => {
            let e = default_exact(m, n);
            if exact_fits(e, m, n) {
                Some(Plan { exact: Some(e), sis: false, certs })
            } else if policy == EnginePolicy::Auto {
                Some(Plan { exact: None, sis: true, certs })
            } else {
                None
            }
        }
    }
}

fn run_exact(engine: Engine, a: &LogMatrix) -> Result<f64> {
    let r = match engine {
        Engine::Brute => perm_brute(a)?,
        Engine::Ryser => perm_ryser(a)?,
        Engine::Dp => perm_dp(a)?,
        Engine::Sis => unreachable!("SIS is planned separately"),
    };
    Ok(r.log_perm.ln())
}

const SIS_TAG: u64 = 0x0053_4953;

fn converge_row(cfg: &ExperimentConfig, plan: Plan, m: usize, n: usize, trial: u64) -> Result<ConvergenceRecord> {
    let seed = matrix_seed(cfg.seed, n);
    let spec = SeedSpec::new(seed, trial);
    let a = generate(m, n, &cfg.dist, spec)?;
    let (engine, log_perm) = match (plan.exact, plan.sis) {
        (Some(e), _) => (e.to_string(), Some(run_exact(e, &a)?)),
        (None, true) => ("sis".to_string(), Some(perm_sis(&a, cfg.samples, spec.substream(SIS_TAG))?.log_perm.ln())),
        (None, false) => ("certify".to_string(), None),
    };
    let (log_lower, log_upper) = if plan.certs {
        let log_q = cfg.log_q.unwrap_or_else(|| a.log_quantile(0.25));
        let lo = lower_certificate(&a, cfg.rho, log_q)?.log_bound;
        let hi = tight_upper_certificate(&a).log_bound;
        if let (Some(v), Some(_)) = (log_perm, plan.exact) {
            let slack = 1e-9 * v.abs().max(1.0);
            if lo > v + slack || hi < v - slack {
                return Err(Error::Domain(format!(
                    "certificate sandwich failed at n={n} trial={trial}: {lo} <= {v} <= {hi} does not hold"
                )));
            }
        }
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };
    let numerator = log_perm.or(log_lower).expect("value or bound");
    Ok(ConvergenceRecord {
        n,
        m,
        trial,
        seed,
        engine,
        log_perm,
        log_lower,
        log_upper,
        ratio: numerator / (m as f64 * (n as f64).ln()),
        target: cfg.dist.target_ratio(),
    })
}

fn converge_common(cfg: &ExperimentConfig, shapes: &[(usize, usize)], rectangular: bool) -> Result<ConvergeReport> {
    cfg.validate()?;
    let mut plans = Vec::new();
    let mut refused = Vec::new();
    for &(m, n) in shapes {
        match plan_for(cfg, m, n) {
            Some(p) => plans.push(p),
            None => refused.push(format!("{m}x{n}")),
        }
    }
    if !refused.is_empty() {
        let engine = cfg.engine.map_or("the exact engines".to_string(), |e| e.to_string());
        return Err(Error::Refused(format!(
            "sizes beyond {engine}: {}; use policy auto or certify_only",
            refused.join(", ")
        )));
    }
    let jobs: Vec<(usize, u64)> = (0..shapes.len()).flat_map(|s| (0..cfg.trials).map(move |t| (s, t))).collect();
    let records: Vec<ConvergenceRecord> = cfg.with_pool(|| {
        jobs.par_iter()
            .map(|&(s, t)| converge_row(cfg, plans[s], shapes[s].0, shapes[s].1, t))
            .collect::<Result<Vec<_>>>()
    })??;
    let summaries = shapes
        .iter()
        .map(|&(m, n)| {
            let mut ratios: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.ratio).collect();
            ratios.sort_by(f64::total_cmp);
            SizeSummary {
                n,
                m,
                seed: matrix_seed(cfg.seed, n),
                q25: quantile(&ratios, 0.25),
                median: quantile(&ratios, 0.5),
                q75: quantile(&ratios, 0.75),
                target: cfg.dist.target_ratio(),
                condition: rectangular.then(|| height_condition(m, n)),
            }
        })
        .collect();
    Ok(ConvergeReport { records, summaries, rectangular })
}

/// Square matrices of each size, `trials` each.
pub fn run_converge(cfg: &ExperimentConfig) -> Result<ConvergeReport> {
    let shapes: Vec<(usize, usize)> = cfg.sizes.iter().map(|&n| (n, n)).collect();
    converge_common(cfg, &shapes, false)
}

/// Height for width `n`: the configured height or the rule, at most `n`,
/// lowered until the subset DP fits its budget when the DP will run.
pub fn rect_height(cfg: &ExperimentConfig, n: usize) -> usize {
    let mut m = cfg.height.unwrap_or_else(|| height_rule(n, cfg.height_c)).clamp(1, n);
    let dp_runs = cfg.policy != EnginePolicy::CertifyOnly && matches!(cfg.engine, None | Some(Engine::Dp));
    if dp_runs && cfg.height.is_none() {
        while m > 1 && !dp_feasible(m, n) {
            m -= 1;
        }
    }
    m
}

/// Wide `m_n x n` matrices with heights from the rule.
pub fn run_converge_rect(cfg: &ExperimentConfig) -> Result<ConvergeReport> {
    cfg.validate()?;
    let shapes: Vec<(usize, usize)> = cfg.sizes.iter().map(|&n| (rect_height(cfg, n), n)).collect();
    let mut rect_cfg = cfg.clone();
    if rect_cfg.engine.is_none() && cfg.policy != EnginePolicy::CertifyOnly {
        rect_cfg.engine = Some(Engine::Dp);
    }
    converge_common(&rect_cfg, &shapes, true)
}

pub fn run_zstat(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let mut out = String::from("n,k,trials,seed,mean_count,stderr,expected,z_score,gamma,exceed_rate\n");
    for &n in &cfg.sizes {
        let seed = matrix_seed(cfg.seed, n);
        let h = cfg.with_pool(|| z_histogram(n, cfg.trials, SeedSpec::new(seed, 0)))??;
        for k in 1..=h.max_bin() {
            let expected = expected_z(n as u64, k);
            let (mean, se) = (h.mean(k), h.stderr(k));
            let z = if se > 0.0 { (mean - expected) / se } else { f64::NAN };
            let _ = writeln!(
                out,
                "{n},{k},{},{seed},{mean},{se},{expected},{},{},{}",
                cfg.trials,
                if z.is_nan() { String::new() } else { z.to_string() },
                cfg.gamma,
                h.exceedance_rate(k, cfg.gamma)
            );
        }
    }
    Ok(out)
}

pub fn run_maxdiag(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let mut out = String::from("n,trials,seed,t,p_le,bound_le,p_ge,bound_ge,mean_exp_r,stderr_exp_r,bound_mean_exp\n");
    for &n in &cfg.sizes {
        let seed = matrix_seed(cfg.seed, n);
        let d = cfg.with_pool(|| max_exp_diagnostic(n, cfg.trials, cfg.t, SeedSpec::new(seed, 0)))??;
        let _ = writeln!(
            out,
            "{n},{},{seed},{},{},{},{},{},{},{},{}",
            d.trials, d.t, d.p_le, d.bound_le, d.p_ge, d.bound_ge, d.mean_exp_r, d.stderr_exp_r, d.bound_mean_exp
        );
    }
    Ok(out)
}

/// `ln P(xi >= t) / ln t` on a geometric grid of `ln t`, with the Pareto
/// reference value `-1/beta` where it applies.
pub fn run_tailcheck(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let upper: f64 = match &cfg.dist {
        DistSpec::Lattice(l) => l.log_support(l.k_max()) * 1.01,
        _ => 50.0,
    };
    let lower: f64 = 0.5;
    let reference = cfg.dist.beta().map(|b| -1.0 / b);
    let mut out = String::from("log_t,log_tail,tail_exponent,reference\n");
    for i in 0..cfg.grid {
        let frac = if cfg.grid == 1 { 0.0 } else { i as f64 / (cfg.grid - 1) as f64 };
        let log_t = (lower.ln() + frac * (upper.ln() - lower.ln())).exp();
        let e = crate::randsrc::tail_exponent(&cfg.dist, log_t)?;
        let _ = writeln!(out, "{log_t},{},{e},{}", cfg.dist.log_tail(log_t), csv_num(reference));
    }
    Ok(out)
}

const SCAN_TAG: u64 = 0x5343_414e;

pub fn run_scan(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = cfg.sizes.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    let rows: Vec<String> = cfg.with_pool(|| {
        jobs.par_iter()
            .map(|&(n, t)| {
                let seed = matrix_seed(cfg.seed, n);
                let spec = SeedSpec::new(seed, t);
                let a = generate(n, n, &cfg.dist, spec)?;
                let r = submatrix_scan(&a, cfg.alpha, cfg.samples, spec.substream(SCAN_TAG))?;
                let full = r.records.iter().find(|x| x.k == n).map(|x| x.ratio);
                Ok(format!(
                    "{n},{t},{seed},{},{},{},{},{},{},{}",
                    cfg.alpha,
                    r.records.len(),
                    r.min_witness.k,
                    r.min_ratio,
                    r.max_witness.k,
                    r.max_ratio,
                    csv_num(full)
                ))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut out = String::from("n,trial,seed,alpha,submatrices,k_min,min_ratio,k_max,max_ratio,full_ratio\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomRow {
    pub k_lo: u32,
    pub k_hi: u32,
    pub log_t: f64,
    /// `ln P(t <= xi < t_{k_hi})`.
    pub log_lhs: f64,
    /// `ln P(t_{k_lo} xi' >= t)` for the companion `xi'`.
    pub log_rhs: f64,
    /// `P(lhs) - P(rhs)`; positive values are violations.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomReport {
    pub rows: Vec<DomRow>,
    pub violations: usize,
    pub max_excess: f64,
}

impl DomReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_lo,k_hi,log_t,log_lhs,log_rhs,excess\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.k_lo, r.k_hi, r.log_t, r.log_lhs, r.log_rhs, r.excess);
        }
        out
    }
}

pub const DOMCHECK_SLACK: f64 = 1e-12;

/// Checks that between consecutive special indices `k_lo < k_hi` the
/// lattice variable is dominated by `t_{k_lo}` times the companion lattice
/// (which uses `c1` everywhere): `P(t <= xi < t_{k_hi}) <= P(t_{k_lo} xi' >= t)`
/// for `ln t` on an even grid in `(lambda^k_lo, lambda^k_hi)` plus every
/// support point inside. Both sides are exact tail sums.
pub fn domcheck(l: &Lattice, grid: usize) -> DomReport {
    let companion = l.companion();
    let special = l.s_set();
    let intervals: Vec<(u32, u32)> = special.windows(2).map(|w| (w[0], w[1])).collect();
    let per = if intervals.is_empty() { 0 } else { grid.div_ceil(intervals.len()) };
    let mut rows = Vec::new();
    for &(k_lo, k_hi) in &intervals {
        let lo = l.log_support(k_lo);
        let hi = l.log_support(k_hi);
        let mut points: Vec<f64> = (0..per).map(|j| lo + (hi - lo) * (j as f64 + 0.5) / per as f64).collect();
        points.extend((k_lo + 1..k_hi).map(|k| l.log_support(k)));
        points.sort_by(f64::total_cmp);
        for log_t in points {
            let log_lhs = l.log_tail_between(log_t, Some(k_hi));
            let log_rhs = companion.log_tail_between(log_t - lo, None);
            rows.push(DomRow { k_lo, k_hi, log_t, log_lhs, log_rhs, excess: log_lhs.exp() - log_rhs.exp() });
        }
    }
    let violations = rows.iter().filter(|r| r.excess > DOMCHECK_SLACK).count();
    let max_excess = rows.iter().map(|r| r.excess).fold(f64::NEG_INFINITY, f64::max);
    DomReport { rows, violations, max_excess }
}

pub fn run_domcheck(cfg: &ExperimentConfig) -> Result<DomReport> {
    cfg.validate()?;
    match &cfg.dist {
        DistSpec::Lattice(l) => Ok(domcheck(l, cfg.grid)),
        other => Err(Error::Config(format!("domcheck needs a lattice distribution, got {other}"))),
    }
}
