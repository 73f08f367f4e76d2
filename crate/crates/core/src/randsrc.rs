//! Counter-based uniforms and the entry distributions, sampled directly in
//! the log domain.
//!
//! # Mixing function
//!
//! `uniform01(s, i, j)` is a pure function of `(s.seed, s.trial, i, j)`:
//!
//! ```text
//! mix64(z)    = SplitMix64 finalizer:
//!                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!                 z ^ (z >> 31)
//! absorb(h,x) = mix64(h + x + 0x9E3779B97F4A7C15)        (wrapping)
//! h           = absorb(absorb(absorb(mix64(seed), trial), i), j)
//! u           = ((h >> 12) + 0.5) * 2^-52
//! ```
//!
//! `u` therefore lies in `[2^-53, 1 - 2^-53]`, strictly inside `(0, 1)`.
//! Any cell of any trial can be regenerated in isolation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{log_sum_f64, CompensatedSum, LogReal};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, x: u64) -> u64 {
    mix64(h.wrapping_add(x).wrapping_add(GOLDEN))
}

/// Identifies one random matrix: a master seed and a trial index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub trial: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, trial: u64) -> Self {
        SeedSpec { seed, trial }
    }

    /// An independent stream for a different purpose (SIS paths, scan
    /// selectors) keyed by `tag`, with the same trial index.
    pub fn substream(self, tag: u64) -> SeedSpec {
        SeedSpec {
            seed: absorb(mix64(self.seed ^ 0xD1B5_4A32_D192_ED03), tag),
            trial: self.trial,
        }
    }

    pub fn with_trial(self, trial: u64) -> SeedSpec {
        SeedSpec { trial, ..self }
    }
}

/// Raw 64-bit hash of `(seed, trial, i, j)`.
pub fn cell_hash(s: SeedSpec, i: u64, j: u64) -> u64 {
    absorb(absorb(absorb(mix64(s.seed), s.trial), i), j)
}

/// Deterministic uniform in the open unit interval for cell `(i, j)`.
#[inline]
pub fn uniform01(s: SeedSpec, i: u64, j: u64) -> f64 {
    let h = cell_hash(s, i, j);
    ((h >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Parameters of the doubly-exponential lattice distribution supported on
/// `t_k = exp(lambda^k)`, truncated at `k_max` and renormalised.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    lambda: f64,
    c1: f64,
    c2: f64,
    s_set: Vec<u32>,
    k_max: u32,
    /// `ln p_k` for `k = 1..=k_max`, at index `k - 1`.
    log_probs: Vec<f64>,
    /// Running sum of `p_k`; last entry forced to 1.
    cdf: Vec<f64>,
}

impl Lattice {
    pub fn new(lambda: f64, c1: f64, c2: f64, s_set: Vec<u32>, k_max: u32) -> Result<Self> {
        if !(lambda > 1.0 && c1 > lambda && c2 > c1) || !c2.is_finite() {
            return Err(Error::InvalidDist(format!(
                "lattice needs c2 > c1 > lambda > 1, got lambda={lambda}, c1={c1}, c2={c2}"
            )));
        }
        if k_max == 0 {
            return Err(Error::InvalidDist("lattice kmax must be positive".into()));
        }
        for w in s_set.windows(2) {
            if u64::from(w[1]) <= 2 * u64::from(w[0]) {
                return Err(Error::InvalidDist(format!(
                    "lattice s-set members must satisfy k_(i+1) > 2 k_i, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&bad) = s_set.iter().find(|&&k| k == 0 || k > k_max) {
            return Err(Error::InvalidDist(format!(
                "lattice s-set member {bad} outside [1, {k_max}]"
            )));
        }
        if lambda.powi(k_max as i32) > 1e300 {
            return Err(Error::InvalidDist("lattice support overflows at this kmax".into()));
        }
        Ok(Self::build(lambda, c1, c2, s_set, k_max))
    }

    fn build(lambda: f64, c1: f64, c2: f64, s_set: Vec<u32>, k_max: u32) -> Self {
        let unnorm: Vec<f64> = (1..=k_max)
            .map(|k| {
                let c = if s_set.contains(&k) { c2 } else { c1 };
                -lambda.powi(k as i32) / c
            })
            .collect();
        let log_z = log_sum_f64(&unnorm);
        let log_probs: Vec<f64> = unnorm.iter().map(|l| l - log_z).collect();
        let mut acc = CompensatedSum::new();
        let mut cdf: Vec<f64> = log_probs
            .iter()
            .map(|lp| {
                acc.add(lp.exp());
                acc.value()
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Lattice {
            lambda,
            c1,
            c2,
            s_set,
            k_max,
            log_probs,
            cdf,
        }
    }

    /// The companion law with `c1` at every support point; it dominates
    /// this law between consecutive members of the s-set.
    pub fn companion(&self) -> Lattice {
        Self::build(self.lambda, self.c1, self.c2, Vec::new(), self.k_max)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn s_set(&self) -> &[u32] {
        &self.s_set
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// `ln t_k = lambda^k`.
    pub fn log_support(&self, k: u32) -> f64 {
        self.lambda.powi(k as i32)
    }

    /// `ln P(xi = t_k)`.
    pub fn log_prob(&self, k: u32) -> f64 {
        assert!((1..=self.k_max).contains(&k));
        self.log_probs[k as usize - 1]
    }

    /// `ln P(xi >= t)` for `ln t = log_t`; summed over `k` with
    /// `lambda^k >= log_t` and `k < k_end` (exclusive upper index when given).
    pub fn log_tail_between(&self, log_t: f64, k_end: Option<u32>) -> f64 {
        let hi = k_end.unwrap_or(self.k_max + 1);
        let terms: Vec<f64> = (1..hi.min(self.k_max + 1))
            .filter(|&k| self.log_support(k) >= log_t)
            .map(|k| self.log_prob(k))
            .collect();
        log_sum_f64(&terms)
    }

    fn sample_index(&self, u: f64) -> u32 {
        let idx = self.cdf.partition_point(|&c| c < u);
        idx.min(self.cdf.len() - 1) as u32 + 1
    }
}

/// A closed description of an entry distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum DistSpec {
    /// `P(xi >= t) = t^(-1/beta)` for `t >= 1`.
    Pareto { beta: f64 },
    /// `ln xi` is rate-1 exponential (the Pareto law with `beta = 1`).
    ExpRate1,
    Lattice(Lattice),
    /// `xi = exp(logval)` almost surely.
    PointMass { logval: f64 },
}

impl DistSpec {
    pub fn pareto(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidDist(format!("pareto beta must be positive, got {beta}")));
        }
        Ok(DistSpec::Pareto { beta })
    }

    pub fn point(logval: f64) -> Result<Self> {
        if !logval.is_finite() {
            return Err(Error::InvalidDist(format!("point logval must be finite, got {logval}")));
        }
        Ok(DistSpec::PointMass { logval })
    }

    pub fn lattice(lambda: f64, c1: f64, c2: f64, s_set: Vec<u32>, k_max: u32) -> Result<Self> {
        Lattice::new(lambda, c1, c2, s_set, k_max).map(DistSpec::Lattice)
    }

    /// `lambda = 1.5, c1 = 2, c2 = 3, s = {2, 5, 11, 23}, kmax = 25`.
    pub fn default_lattice() -> Self {
        DistSpec::lattice(1.5, 2.0, 3.0, vec![2, 5, 11, 23], 25).expect("valid defaults")
    }

    /// Tail index `beta` where one exists.
    pub fn beta(&self) -> Option<f64> {
        match self {
            DistSpec::Pareto { beta } => Some(*beta),
            DistSpec::ExpRate1 => Some(1.0),
            _ => None,
        }
    }

    /// Limit of `log perm / (n log n)` for tail index `beta`: `max(1, beta)`.
    pub fn target_ratio(&self) -> Option<f64> {
        self.beta().map(|b| b.max(1.0))
    }

    /// `E xi`, when finite and known in closed form.
    pub fn mean(&self) -> Option<f64> {
        match self {
            DistSpec::Pareto { beta } if *beta < 1.0 => Some(1.0 / (1.0 - beta)),
            DistSpec::PointMass { logval } => Some(logval.exp()),
            _ => None,
        }
    }

    /// `ln P(xi >= t)` in closed form, for `ln t = log_t`.
    pub fn log_tail(&self, log_t: f64) -> f64 {
        match self {
            DistSpec::Pareto { beta } => {
                if log_t <= 0.0 {
                    0.0
                } else {
                    -log_t / beta
                }
            }
            DistSpec::ExpRate1 => {
                if log_t <= 0.0 {
                    0.0
                } else {
                    -log_t
                }
            }
            DistSpec::PointMass { logval } => {
                if log_t <= *logval {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            DistSpec::Lattice(l) => l.log_tail_between(log_t, None),
        }
    }
}

/// Inverse-transform sample of `ln xi` from a uniform `u` in `(0, 1)`.
pub fn sample_log(d: &DistSpec, u: f64) -> LogReal {
    debug_assert!(u > 0.0 && u < 1.0, "uniform out of range: {u}");
    let v = match d {
        DistSpec::Pareto { beta } => -beta * u.ln(),
        DistSpec::ExpRate1 => -u.ln(),
        DistSpec::Lattice(l) => l.log_support(l.sample_index(u)),
        DistSpec::PointMass { logval } => *logval,
    };
    LogReal::from_log(v)
}

/// `ln P(xi >= t) / ln t` in closed form.
///
/// Point masses below `t` give `-inf` (probability zero).
pub fn tail_exponent(d: &DistSpec, log_t: f64) -> Result<f64> {
    if log_t.is_nan() || log_t <= 0.0 {
        return Err(Error::Domain(format!("tail exponent needs ln t > 0, got {log_t}")));
    }
    Ok(match d {
        DistSpec::Pareto { beta } => -1.0 / beta,
        DistSpec::ExpRate1 => -1.0,
        _ => d.log_tail(log_t) / log_t,
    })
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Pareto { beta } => write!(f, "pareto:beta={beta}"),
            DistSpec::ExpRate1 => write!(f, "exp1"),
            DistSpec::PointMass { logval } => write!(f, "point:logval={logval}"),
            DistSpec::Lattice(l) => {
                let s: Vec<String> = l.s_set.iter().map(u32::to_string).collect();
                write!(
                    f,
                    "lattice:lambda={},c1={},c2={},s={},kmax={}",
                    l.lambda,
                    l.c1,
                    l.c2,
                    s.join("/"),
                    l.k_max
                )
            }
        }
    }
}

fn parse_params(body: &str) -> Result<Vec<(&str, &str)>> {
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidDist(format!("expected key=value, got '{kv}'")))
        })
        .collect()
}

fn param<'a>(params: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    params
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidDist(format!("missing parameter '{key}'")))
}

fn num<T: FromStr>(params: &[(&str, &str)], key: &str) -> Result<T> {
    let v = param(params, key)?;
    v.parse()
        .map_err(|_| Error::InvalidDist(format!("cannot parse {key}='{v}'")))
}

fn reject_unknown(params: &[(&str, &str)], allowed: &[&str]) -> Result<()> {
    match params.iter().find(|(k, _)| !allowed.contains(k)) {
        Some((k, _)) => Err(Error::InvalidDist(format!("unknown parameter '{k}'"))),
        None => Ok(()),
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let params = parse_params(body)?;
        match kind {
            "pareto" => {
                reject_unknown(&params, &["beta"])?;
                DistSpec::pareto(num(&params, "beta")?)
            }
            "exp1" => {
                reject_unknown(&params, &[])?;
                Ok(DistSpec::ExpRate1)
            }
            "point" => {
                reject_unknown(&params, &["logval"])?;
                DistSpec::point(num(&params, "logval")?)
            }
            "lattice" => {
                reject_unknown(&params, &["lambda", "c1", "c2", "s", "kmax"])?;
                let s_raw = param(&params, "s")?;
                let s_set = if s_raw.is_empty() {
                    Vec::new()
                } else {
                    s_raw
                        .split('/')
                        .map(|x| {
                            x.trim()
                                .parse()
                                .map_err(|_| Error::InvalidDist(format!("bad s-set member '{x}'")))
                        })
                        .collect::<Result<Vec<u32>>>()?
                };
                DistSpec::lattice(
                    num(&params, "lambda")?,
                    num(&params, "c1")?,
                    num(&params, "c2")?,
                    s_set,
                    num(&params, "kmax")?,
                )
            }
            other => Err(Error::InvalidDist(format!(
                "unknown distribution '{other}' (expected pareto, exp1, lattice or point)"
            ))),
        }
    }
}

impl Serialize for DistSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
