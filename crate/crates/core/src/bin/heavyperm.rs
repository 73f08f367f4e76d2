use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use heavyperm::certify::{lower_certificate, tight_upper_certificate, upper_certificate, verify};
use heavyperm::harness::{
    run_converge, run_converge_rect, run_domcheck, run_maxdiag, run_scan, run_tailcheck, run_zstat, write_output,
    EnginePolicy, ExperimentConfig, Kind,
};
use heavyperm::matrixgen::{generate, load, save, to_json, LogMatrix};
use heavyperm::permcore::{perm_exact, perm_sis, perm_with};
use heavyperm::{DistSpec, Engine, Error, Result, SeedSpec};

#[derive(Parser)]
#[command(name = "heavyperm", version, about = "Log-domain permanents of heavy-tailed random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Brute,
    Ryser,
    Dp,
    Sis,
}

impl EngineArg {
    fn engine(self) -> Option<Engine> {
        match self {
            EngineArg::Auto => None,
            EngineArg::Brute => Some(Engine::Brute),
            EngineArg::Ryser => Some(Engine::Ryser),
            EngineArg::Dp => Some(Engine::Dp),
            EngineArg::Sis => Some(Engine::Sis),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Auto,
    ExactOnly,
    CertifyOnly,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// e.g. `pareto:beta=2`, `exp1`, `point:logval=0`,
    /// `lattice:lambda=1.5,c1=2,c2=3,s=2/5/11/23,kmax=25`
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    engine: EngineArg,
    /// Omit the timestamp line so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct MatrixSource {
    /// A `.permmat.json` file; otherwise a matrix is generated.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Columns of a generated matrix.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Rows of a generated matrix (defaults to n).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

#[derive(Args, Clone)]
struct Experiment {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a matrix file.
    Gen {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: MatrixSource,
    },
    /// Exact permanent (or SIS with --engine sis).
    Perm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// SIS estimate with its standard error.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Lower and upper certificates.
    Certify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Threshold; defaults to the lower-quartile entry.
        #[arg(long, allow_hyphen_values = true)]
        log_q: Option<f64>,
    },
    /// Square convergence experiment.
    Converge {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        log_q: Option<f64>,
    },
    /// Rectangular convergence experiment with the height rule.
    Rect {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        height_c: Option<f64>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        log_q: Option<f64>,
    },
    /// Occupancy counts of permutation sums against their expectation.
    Zstat {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Maxima of exponential rows against their tail bounds.
    Maxdiag {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Tail exponents of the entry distribution.
    Tailcheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Extreme normalized permanents over submatrices.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Tail domination check for lattice distributions.
    Domcheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn parse_dist(text: &Option<String>) -> Result<Option<DistSpec>> {
    text.as_deref().map(str::parse).transpose()
}

fn load_matrix(common: &Common, source: &MatrixSource) -> Result<LogMatrix> {
    match &source.input {
        Some(path) => load(path),
        None => {
            let dist = parse_dist(&common.dist)?.unwrap_or(DistSpec::Pareto { beta: 2.0 });
            let m = source.m.unwrap_or(source.n);
            generate(m, source.n, &dist, SeedSpec::new(common.seed.unwrap_or(0), source.trial))
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config(kind: Kind, common: &Common, exp: &Experiment) -> Result<ExperimentConfig> {
    let mut cfg = match &exp.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = kind;
    if kind == Kind::Domcheck && exp.config.is_none() {
        cfg.dist = DistSpec::default_lattice();
    }
    if let Some(d) = parse_dist(&common.dist)? {
        cfg.dist = d;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(e) = common.engine.engine() {
        cfg.engine = Some(e);
    }
    if common.deterministic {
        cfg.deterministic = true;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if let Some(sizes) = &exp.sizes {
        cfg.sizes = sizes.clone();
    }
    if let Some(p) = exp.policy {
        cfg.policy = match p {
            PolicyArg::Auto => EnginePolicy::Auto,
            PolicyArg::ExactOnly => EnginePolicy::ExactOnly,
            PolicyArg::CertifyOnly => EnginePolicy::CertifyOnly,
        };
    }
    if let Some(s) = exp.samples {
        cfg.samples = s;
    }
    Ok(cfg)
}

fn finish(cfg: &ExperimentConfig, body: &str) -> Result<()> {
    write_output(cfg.out.as_deref().map(Path::new), body, cfg.deterministic)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { common, source } => {
            let a = load_matrix(&common, &source)?;
            match &common.out {
                Some(path) => save(&a, path),
                None => {
                    print!("{}", to_json(&a));
                    Ok(())
                }
            }
        }
        Command::Perm { common, source, samples } => {
            let a = load_matrix(&common, &source)?;
            let s = SeedSpec::new(common.seed.unwrap_or(0), source.trial);
            let r = match common.engine.engine() {
                None => perm_exact(&a)?,
                Some(e) => perm_with(e, &a, samples, s)?,
            };
            emit(&common, &format!("{}\n", serde_json::to_string(&r).expect("serializable")))
        }
        Command::Estimate { common, source, samples } => {
            let a = load_matrix(&common, &source)?;
            let s = SeedSpec::new(common.seed.unwrap_or(0), source.trial);
            let r = perm_sis(&a, samples, s)?;
            emit(&common, &format!("{}\n", serde_json::to_string(&r).expect("serializable")))
        }
        Command::Certify { common, source, rho, log_q } => {
            let a = load_matrix(&common, &source)?;
            let log_q = log_q.unwrap_or_else(|| a.log_quantile(0.25));
            let lower = lower_certificate(&a, rho, log_q)?;
            let upper = tight_upper_certificate(&a);
            verify(&a, &lower)?;
            verify(&a, &upper)?;
            let doc = json!({
                "lower": lower,
                "upper": upper,
                "rowsum_upper": upper_certificate(&a).log_bound,
            });
            emit(&common, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")))
        }
        Command::Converge { common, exp, rho, log_q } => {
            let mut cfg = config(Kind::Converge, &common, &exp)?;
            if let Some(r) = rho {
                cfg.rho = r;
            }
            if log_q.is_some() {
                cfg.log_q = log_q;
            }
            let report = run_converge(&cfg)?;
            finish(&cfg, &report.to_csv())
        }
        Command::Rect { common, exp, height_c, height, rho, log_q } => {
            let mut cfg = config(Kind::ConvergeRect, &common, &exp)?;
            if let Some(c) = height_c {
                cfg.height_c = c;
            }
            if height.is_some() {
                cfg.height = height;
            }
            if let Some(r) = rho {
                cfg.rho = r;
            }
            if log_q.is_some() {
                cfg.log_q = log_q;
            }
            let report = run_converge_rect(&cfg)?;
            finish(&cfg, &report.to_csv())
        }
        Command::Zstat { common, exp, gamma } => {
            let mut cfg = config(Kind::Zstat, &common, &exp)?;
            if let Some(g) = gamma {
                cfg.gamma = g;
            }
            let csv = run_zstat(&cfg)?;
            finish(&cfg, &csv)
        }
        Command::Maxdiag { common, exp, t } => {
            let mut cfg = config(Kind::Maxdiag, &common, &exp)?;
            if let Some(t) = t {
                cfg.t = t;
            }
            let csv = run_maxdiag(&cfg)?;
            finish(&cfg, &csv)
        }
        Command::Tailcheck { common, exp, grid } => {
            let mut cfg = config(Kind::Tailcheck, &common, &exp)?;
            cfg.grid = grid.unwrap_or(100);
            let csv = run_tailcheck(&cfg)?;
            finish(&cfg, &csv)
        }
        Command::Scan { common, exp, alpha } => {
            let mut cfg = config(Kind::Scan, &common, &exp)?;
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            let csv = run_scan(&cfg)?;
            finish(&cfg, &csv)
        }
        Command::Domcheck { common, exp, grid } => {
            let mut cfg = config(Kind::Domcheck, &common, &exp)?;
            if let Some(g) = grid {
                cfg.grid = g;
            }
            let report = run_domcheck(&cfg)?;
            eprintln!(
                "domcheck: {} points, {} violations, max excess {:e}",
                report.rows.len(),
                report.violations,
                report.max_excess
            );
            finish(&cfg, &report.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
