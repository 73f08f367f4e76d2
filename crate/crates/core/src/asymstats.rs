//! Maxima of exponential samples, permutation-sum extremes and occupancy
//! counts of permutation sums against their Gamma-integral expectation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixgen::{generate, LogMatrix};
use crate::numerics::{ln_factorial, ln_gamma};
use crate::permcore::max_weight_assignment;
use crate::randsrc::{uniform01, DistSpec, SeedSpec};

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 100_000;

/// `ln P(a, x)` by the power series, for `x < a + 1`.
fn ln_gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    -x + a * x.ln() - ln_gamma(a) + sum.ln()
}

/// `ln Q(a, x)` by the Lentz continued fraction, for `x >= a + 1`.
fn ln_gamma_q_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    -x + a * x.ln() - ln_gamma(a) + h.ln()
}

/// `ln` of the regularized lower incomplete gamma `P(a, x)`.
pub fn ln_gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma shape must be positive");
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x < a + 1.0 {
        ln_gamma_p_series(a, x)
    } else {
        (-ln_gamma_q_fraction(a, x).exp()).ln_1p()
    }
}

/// `ln` of the regularized upper incomplete gamma `Q(a, x)`.
pub fn ln_gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma shape must be positive");
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        (-ln_gamma_p_series(a, x).exp()).ln_1p()
    } else {
        ln_gamma_q_fraction(a, x)
    }
}

pub fn gamma_p(a: f64, x: f64) -> f64 {
    ln_gamma_p(a, x).exp()
}

pub fn gamma_q(a: f64, x: f64) -> f64 {
    ln_gamma_q(a, x).exp()
}

/// `ln(e^hi - e^lo)` for `hi >= lo`.
fn ln_diff(hi: f64, lo: f64) -> f64 {
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (-(lo - hi).exp()).ln_1p()
    }
}

/// `ln E Z_{n,k}`, where `Z_{n,k}` counts permutations whose sum of
/// rate-1 exponential entries lies in `[(k-1)n, kn)`:
/// `E Z_{n,k} = n! (P(n, kn) - P(n, (k-1)n))`.
///
/// Differences are taken between upper tails once the interval is past
/// the mode, where both `P` values are close to 1.
pub fn ln_expected_z(n: u64, k: u64) -> f64 {
    assert!(n >= 1 && k >= 1, "expected_z needs n >= 1 and k >= 1");
    let a = n as f64;
    let lo = (k - 1) as f64 * a;
    let hi = k as f64 * a;
    let mass = if lo >= a {
        ln_diff(ln_gamma_q(a, lo), ln_gamma_q(a, hi))
    } else {
        ln_diff(ln_gamma_p(a, hi), ln_gamma_p(a, lo))
    };
    ln_factorial(n) + mass
}

pub fn expected_z(n: u64, k: u64) -> f64 {
    ln_expected_z(n, k).exp()
}

/// Counts of permutations per bin `k`, aggregated over trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZHistogram {
    pub n: usize,
    pub trials: u64,
    /// Total count per bin over all trials.
    pub counts: BTreeMap<u64, u64>,
    /// Per-trial counts, `per_trial[t][k - 1]`.
    per_trial: Vec<Vec<u64>>,
}

impl ZHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn mean(&self, k: u64) -> f64 {
        self.counts.get(&k).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    /// Standard error of [`ZHistogram::mean`] from the per-trial counts.
    pub fn stderr(&self, k: u64) -> f64 {
        let t = self.trials as f64;
        if self.trials < 2 {
            return f64::INFINITY;
        }
        let mean = self.mean(k);
        let ss: f64 = self.per_trial.iter().map(|c| (self.count_in(c, k) as f64 - mean).powi(2)).sum();
        (ss / (t - 1.0) / t).sqrt()
    }

    /// Fraction of trials with `Z_{n,k} > (E Z_{n,k})^gamma`.
    pub fn exceedance_rate(&self, k: u64, gamma: f64) -> f64 {
        let limit = gamma * ln_expected_z(self.n as u64, k);
        let hits = self
            .per_trial
            .iter()
            .filter(|c| {
                let z = self.count_in(c, k);
                z > 0 && (z as f64).ln() > limit
            })
            .count();
        hits as f64 / self.trials as f64
    }

    pub fn max_bin(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    fn count_in(&self, c: &[u64], k: u64) -> u64 {
        c.get(k as usize - 1).copied().unwrap_or(0)
    }
}

pub const Z_HISTOGRAM_MAX_N: usize = 8;

fn permutation_sums(y: &LogMatrix, bins: &mut Vec<u64>) {
    let n = y.rows();
    fn walk(y: &LogMatrix, row: usize, used: u32, acc: f64, bins: &mut Vec<u64>) {
        let n = y.rows();
        if row == n {
            let k = (acc / n as f64).floor() as usize + 1;
            if bins.len() < k {
                bins.resize(k, 0);
            }
            bins[k - 1] += 1;
            return;
        }
        for c in 0..n {
            if used & (1 << c) == 0 {
                walk(y, row + 1, used | (1 << c), acc + y.log_entry(row, c), bins);
            }
        }
    }
    if n > 0 {
        walk(y, 0, 0, 0.0, bins);
    }
}

/// Bins every permutation sum `sum_i Y_{i,pi(i)}` of `trials` matrices of
/// rate-1 exponentials into `[(k-1)n, kn)`.
pub fn z_histogram(n: usize, trials: u64, s: SeedSpec) -> Result<ZHistogram> {
    if n > Z_HISTOGRAM_MAX_N {
        return Err(Error::Refused(format!(
            "z_histogram enumerates all n! permutations; n = {n} exceeds {Z_HISTOGRAM_MAX_N}"
        )));
    }
    if n == 0 || trials == 0 {
        return Err(Error::Domain("z_histogram needs n >= 1 and trials >= 1".into()));
    }
    let per_trial: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let y = generate(n, n, &DistSpec::ExpRate1, s.with_trial(t))?;
            let mut bins = Vec::new();
            permutation_sums(&y, &mut bins);
            Ok(bins)
        })
        .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for bins in &per_trial {
        for (idx, &c) in bins.iter().enumerate() {
            if c > 0 {
                *counts.entry(idx as u64 + 1).or_insert(0) += c;
            }
        }
    }
    Ok(ZHistogram { n, trials, counts, per_trial })
}

/// Largest `sum_i a[i][pi(i)]` over permutations, i.e. the log of the
/// largest term of the permanent. `-inf` when every term has a zero.
pub fn max_perm_sum(a: &LogMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "max_perm_sum needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(max_weight_assignment(a).log_value)
}

/// Samples of `R = max_i Y_i / ln n` for rows of `n` rate-1 exponentials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxStats {
    pub n: usize,
    pub trials: u64,
    pub r_samples: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxDiagnostic {
    pub n: usize,
    pub trials: u64,
    pub t: f64,
    /// Empirical `P(R <= t)` and its bound `exp(-n^(1-t))`.
    pub p_le: f64,
    pub bound_le: f64,
    /// Empirical `P(R >= t)` and its bound `n^(1-t)`.
    pub p_ge: f64,
    pub bound_ge: f64,
    /// Empirical `E e^R`, its standard error, and the bound
    /// `exp(1 + 1/(ln n - 1))`.
    pub mean_exp_r: f64,
    pub stderr_exp_r: f64,
    pub bound_mean_exp: f64,
}

const MAXDIAG_STREAM: u64 = 0x004d_4158_4449_4147;

pub fn max_stats(n: usize, trials: u64, s: SeedSpec) -> Result<MaxStats> {
    if n < 3 || trials == 0 {
        return Err(Error::Domain(format!("max statistics need n >= 3 and trials >= 1, got n = {n}, trials = {trials}")));
    }
    let stream = s.substream(MAXDIAG_STREAM);
    let ln_n = (n as f64).ln();
    let r_samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let max_u = (0..n as u64).map(|i| uniform01(stream, t, i)).fold(1.0, f64::min);
            -max_u.ln() / ln_n
        })
        .collect();
    Ok(MaxStats { n, trials, r_samples })
}

/// Monte Carlo check of the tail and moment bounds for `R`.
pub fn max_exp_diagnostic(n: usize, trials: u64, t: f64, s: SeedSpec) -> Result<MaxDiagnostic> {
    let stats = max_stats(n, trials, s)?;
    let count = trials as f64;
    let nf = n as f64;
    let p_le = stats.r_samples.iter().filter(|&&r| r <= t).count() as f64 / count;
    let p_ge = stats.r_samples.iter().filter(|&&r| r >= t).count() as f64 / count;
    let exps: Vec<f64> = stats.r_samples.iter().map(|r| r.exp()).collect();
    let mean = exps.iter().sum::<f64>() / count;
    let var = if trials > 1 {
        exps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(MaxDiagnostic {
        n,
        trials,
        t,
        p_le,
        bound_le: (-nf.powf(1.0 - t)).exp(),
        p_ge,
        bound_ge: nf.powf(1.0 - t),
        mean_exp_r: mean,
        stderr_exp_r: (var / count).sqrt(),
        bound_mean_exp: (1.0 + 1.0 / (nf.ln() - 1.0)).exp(),
    })
}
