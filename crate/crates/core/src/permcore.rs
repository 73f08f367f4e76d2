//! Exact permanents (enumeration, Ryser, subset DP) and the sequential
//! importance sampling estimator, all reporting `ln perm`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixgen::LogMatrix;
use crate::numerics::{log_sum_f64, LogReal, TwoBucketSum};
use crate::randsrc::{uniform01, SeedSpec};

pub const BRUTE_MAX_ROWS: usize = 7;
pub const BRUTE_MAX_COLS: usize = 9;

/// Largest order accepted by [`perm_ryser`].
///
/// After assignment scaling every entry lies in `[0, 1]`, the scaled
/// permanent `P` is at least 1, and each centred row sum is at most
/// `r_i / 2` in magnitude where `r_i <= n` is the scaled row sum. The sum of
/// absolute terms is then at most `2^(n-1) prod(r_i / 2) = prod(r_i) / 2`.
/// The all-ones matrix is the worst case: `n^n / 2` against `P = n!`, a
/// relative rounding error of about `eps * n^n / n!`, i.e. `~1e-6` at
/// `n = 24` with plain summation and well under that with the compensated
/// buckets used here.
/// Heavy-tailed rows are far better conditioned than that. Past `n = 24`
/// the `2^(n-1)` cost is also beyond desk budgets; use [`perm_sis`] or the
/// certificates instead.
pub const RYSER_MAX_N: usize = 24;

pub const DP_MAX_ROWS: usize = 22;
/// Upper limit on `n * 2^m * m` for [`perm_dp`].
pub const DP_WORK_BUDGET: u64 = 1 << 31;

/// Which algorithm produced a [`PermResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Brute,
    Ryser,
    Dp,
    Sis,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Brute => "brute",
            Engine::Ryser => "ryser",
            Engine::Dp => "dp",
            Engine::Sis => "sis",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Engine::Brute),
            "ryser" => Ok(Engine::Ryser),
            "dp" => Ok(Engine::Dp),
            "sis" => Ok(Engine::Sis),
            other => Err(Error::Config(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermResult {
    pub log_perm: LogReal,
    pub engine: Engine,
    /// Delta-method standard error of `ln perm` (SIS only).
    pub est_stderr_log: Option<f64>,
    /// Elementary terms processed.
    pub work: u64,
}

/// Sum over all injections, the oracle for every other engine.
pub fn perm_brute(a: &LogMatrix) -> Result<PermResult> {
    let (m, n) = (a.rows(), a.cols());
    if m > BRUTE_MAX_ROWS || n > BRUTE_MAX_COLS {
        return Err(Error::Refused(format!(
            "perm_brute is limited to {BRUTE_MAX_ROWS}x{BRUTE_MAX_COLS}, got {m}x{n}"
        )));
    }
    let mut terms = Vec::new();
    let mut stack: Vec<(usize, u32, f64)> = vec![(0, 0, 0.0)];
    let mut work = 0u64;
    while let Some((row, used, acc)) = stack.pop() {
        if row == m {
            work += 1;
            if acc != f64::NEG_INFINITY {
                terms.push(acc);
            }
            continue;
        }
        for c in (0..n).rev() {
            if used & (1 << c) == 0 {
                stack.push((row + 1, used | (1 << c), acc + a.log_entry(row, c)));
            }
        }
    }
    Ok(PermResult {
        log_perm: LogReal::from_log(log_sum_f64(&terms)),
        engine: Engine::Brute,
        est_stderr_log: None,
        work,
    })
}

/// Maximum-weight injection of rows into columns with its dual potentials.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub col_of_row: Vec<usize>,
    /// `log_entry(i, j) <= row_pot[i] + col_pot[j]` for every cell, with
    /// equality on the assignment.
    pub row_pot: Vec<f64>,
    pub col_pot: Vec<f64>,
    /// Sum of the assigned log entries; `-inf` when no injection avoids a
    /// zero entry.
    pub log_value: f64,
}

/// Shortest augmenting path assignment (Hungarian method with potentials),
/// `O(m^2 n)`. Zero entries are replaced by a penalty larger than any
/// finite assignment can offset, so they are used only when unavoidable.
pub fn max_weight_assignment(a: &LogMatrix) -> Assignment {
    let (m, n) = (a.rows(), a.cols());
    let finite = a.log_entries().iter().copied().filter(|x| x.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let forbidden = -lo + (hi - lo + 1.0) * (m as f64 + 1.0);
    let cost = |i: usize, j: usize| {
        let x = a.log_entry(i, j);
        if x == f64::NEG_INFINITY {
            forbidden
        } else {
            -x
        }
    };

    // 1-based rows and columns; column 0 is the virtual root.
    let mut u = vec![0.0; m + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=m {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; m];
    for j in 1..=n {
        if owner[j] != 0 {
            col_of_row[owner[j] - 1] = j - 1;
        }
    }
    let log_value = col_of_row.iter().enumerate().map(|(i, &j)| a.log_entry(i, j)).sum();
    Assignment {
        col_of_row,
        row_pot: u[1..].iter().map(|x| -x).collect(),
        col_pot: v[1..].iter().map(|x| -x).collect(),
        log_value,
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Number of independent Gray-code segments for order `n`. A function of
/// `n` only, so results do not depend on the thread count.
fn ryser_segments(n: usize) -> usize {
    if n >= 14 {
        64
    } else {
        1
    }
}

/// Ryser's inclusion-exclusion with Gray-code subset order.
///
/// Uses the centred (Nijenhuis-Wilf) form
/// `perm A = (-1)^(n-1) 2 sum_{S in [n-1]} (-1)^|S| prod_i (x_i + sum_{j in S} a_ij)`
/// with `x_i = a_{i,n-1} - (1/2) sum_j a_ij`, which halves the subset count
/// and the term magnitudes.
///
/// Before summing, rows and columns are scaled by the dual potentials of
/// the maximum-weight assignment, so every scaled entry is at most 1 and
/// the optimal assignment is all ones. The scaled permanent is then at
/// least 1 while the terms stay bounded by the product of half row sums.
/// A matrix with no positive injection is detected exactly at this stage.
/// The per-row sums are updated incrementally with one compensation term
/// per row, and the subset terms go into two compensated sign buckets.
pub fn perm_ryser(a: &LogMatrix) -> Result<PermResult> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "perm_ryser needs a square matrix, got {}x{}; use perm_dp for rectangular input",
            a.rows(),
            a.cols()
        )));
    }
    if n > RYSER_MAX_N {
        return Err(Error::Refused(format!(
            "perm_ryser is limited to n <= {RYSER_MAX_N}, got {n}; use perm_sis or the certificates"
        )));
    }

    let assign = max_weight_assignment(a);
    if assign.log_value == f64::NEG_INFINITY {
        return Ok(PermResult {
            log_perm: LogReal::ZERO,
            engine: Engine::Ryser,
            est_stderr_log: None,
            work: 0,
        });
    }
    let log_scale: f64 = assign.row_pot.iter().sum::<f64>() + assign.col_pot.iter().sum::<f64>();
    let mut scaled = vec![0.0; n * n];
    for i in 0..n {
        let row = a.row(i);
        for j in 0..n {
            scaled[i * n + j] = (row[j] - assign.row_pot[i] - assign.col_pot[j]).exp();
        }
    }
    // Column-major copy so a Gray flip touches contiguous memory.
    let mut by_col = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            by_col[j * n + i] = scaled[i * n + j];
        }
    }
    let base: Vec<f64> = (0..n)
        .map(|i| {
            let row = &scaled[i * n..(i + 1) * n];
            let mut s = crate::numerics::CompensatedSum::new();
            for &x in row {
                s.add(x);
            }
            row[n - 1] - 0.5 * s.value()
        })
        .collect();

    let free = n - 1;
    let total: u64 = 1 << free;
    let segs = ryser_segments(n).min(total as usize) as u64;
    let seg_len = total / segs;

    let run_segment = |seg: u64| -> TwoBucketSum {
        let start = seg * seg_len;
        let end = start + seg_len;
        let mut gray = start ^ (start >> 1);
        let mut hi = base.clone();
        let mut lo = vec![0.0; n];
        for j in 0..free {
            if gray & (1 << j) != 0 {
                let col = &by_col[j * n..(j + 1) * n];
                for i in 0..n {
                    let (s, e) = two_sum(hi[i], col[i]);
                    hi[i] = s;
                    lo[i] += e;
                }
            }
        }
        let mut acc = TwoBucketSum::new();
        let term = |hi: &[f64], lo: &[f64], gray: u64| -> f64 {
            let mut p = 1.0;
            for i in 0..n {
                p *= hi[i] + lo[i];
            }
            if gray.count_ones() % 2 == 1 {
                -p
            } else {
                p
            }
        };
        acc.add(term(&hi, &lo, gray));
        for k in (start + 1)..end {
            let j = k.trailing_zeros() as usize;
            let bit = 1u64 << j;
            let col = &by_col[j * n..(j + 1) * n];
            if gray & bit != 0 {
                for i in 0..n {
                    let (s, e) = two_sum(hi[i], -col[i]);
                    hi[i] = s;
                    lo[i] += e;
                }
            } else {
                for i in 0..n {
                    let (s, e) = two_sum(hi[i], col[i]);
                    hi[i] = s;
                    lo[i] += e;
                }
            }
            gray ^= bit;
            acc.add(term(&hi, &lo, gray));
        }
        acc
    };

    let parts: Vec<TwoBucketSum> = if segs > 1 {
        (0..segs).into_par_iter().map(run_segment).collect()
    } else {
        vec![run_segment(0)]
    };
    let mut acc = TwoBucketSum::new();
    for p in &parts {
        acc.merge(p);
    }
    let sign = if free % 2 == 1 { -1.0 } else { 1.0 };
    let value = sign * 2.0 * acc.value();
    let log_perm = if value > 0.0 {
        LogReal::from_log(value.ln() + log_scale)
    } else {
        LogReal::ZERO
    };
    Ok(PermResult {
        log_perm,
        engine: Engine::Ryser,
        est_stderr_log: None,
        work: total * n as u64,
    })
}

/// `n * 2^m * m`, the work measure checked against [`DP_WORK_BUDGET`].
pub fn dp_work(m: usize, n: usize) -> u64 {
    (n as u64).saturating_mul(1u64 << m.min(63)).saturating_mul(m as u64)
}

pub fn dp_feasible(m: usize, n: usize) -> bool {
    m <= DP_MAX_ROWS && dp_work(m, n) <= DP_WORK_BUDGET
}

/// Subset dynamic program over columns; subtraction-free and therefore
/// the reference engine for rectangular input and for checking Ryser.
///
/// State `S` is the set of rows already matched. Column `c` either stays
/// unused or is matched to some row `i` not in `S`, weighted by `a[i][c]`.
pub fn perm_dp(a: &LogMatrix) -> Result<PermResult> {
    let (m, n) = (a.rows(), a.cols());
    if !dp_feasible(m, n) {
        return Err(Error::Refused(format!(
            "perm_dp needs m <= {DP_MAX_ROWS} and n*2^m*m <= {DP_WORK_BUDGET}, got {m}x{n}"
        )));
    }
    let states = 1usize << m;
    let full = states - 1;
    let mut cur = vec![f64::NEG_INFINITY; states];
    cur[0] = 0.0;
    let mut next = cur.clone();
    let mut work = 0u64;

    for c in 0..n {
        let remaining_after = n - c - 1;
        let max_pop = (c + 1).min(m) as u32;
        let min_pop = m.saturating_sub(remaining_after) as u32;
        let column: Vec<f64> = (0..m).map(|i| a.log_entry(i, c)).collect();
        let prev = &cur;
        let update = |(t, out): (usize, &mut f64)| {
            let pop = t.count_ones();
            if pop > max_pop || pop < min_pop {
                *out = f64::NEG_INFINITY;
                return;
            }
            let mut terms = [f64::NEG_INFINITY; DP_MAX_ROWS + 1];
            let mut len = 0;
            terms[len] = prev[t];
            len += 1;
            let mut rest = t;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                terms[len] = prev[t ^ (1 << i)] + column[i];
                len += 1;
            }
            *out = log_sum_small(&terms[..len]);
        };
        if states >= 1 << 12 {
            next.par_iter_mut().enumerate().for_each(update);
        } else {
            next.iter_mut().enumerate().for_each(update);
        }
        work += (states as u64) * m as u64;
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(PermResult {
        log_perm: LogReal::from_log(cur[full]),
        engine: Engine::Dp,
        est_stderr_log: None,
        work,
    })
}

#[inline]
fn log_sum_small(terms: &[f64]) -> f64 {
    let mx = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    let s: f64 = terms.iter().map(|&x| (x - mx).exp()).sum();
    mx + s.ln()
}

const SIS_STREAM: u64 = 0x5153_5f50_4154_4853;

/// Log-weight of one SIS path: rows top-down, each choosing an available
/// column with probability proportional to its entry, returning
/// `sum_i ln(restricted row sum_i)`.
pub fn sis_path_log_weight(a: &LogMatrix, s: SeedSpec, sample: u64) -> f64 {
    let (m, n) = (a.rows(), a.cols());
    let stream = s.substream(SIS_STREAM);
    let mut avail: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; n];
    let mut logw = 0.0;
    for i in 0..m {
        let row = a.row(i);
        let mx = avail.iter().map(|&j| row[j]).fold(f64::NEG_INFINITY, f64::max);
        if mx == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let mut total = 0.0;
        for (slot, &j) in avail.iter().enumerate() {
            w[slot] = (row[j] - mx).exp();
            total += w[slot];
        }
        logw += mx + total.ln();
        let target = uniform01(stream, sample, i as u64) * total;
        let mut cum = 0.0;
        let mut pick = avail.len() - 1;
        for (slot, &wt) in w.iter().enumerate().take(avail.len()) {
            cum += wt;
            if cum > target && wt > 0.0 {
                pick = slot;
                break;
            }
        }
        // Rounding can leave the fallback on a zero-weight column.
        while w[pick] == 0.0 {
            pick -= 1;
        }
        avail.remove(pick);
    }
    logw
}

/// Sequential importance sampling. The weight of each path has
/// expectation exactly `perm A`; the estimate is the sample mean of
/// `samples` independent paths, with a delta-method standard error of its
/// logarithm. Bit-deterministic for fixed `(a, samples, s)`.
pub fn perm_sis(a: &LogMatrix, samples: u64, s: SeedSpec) -> Result<PermResult> {
    if samples == 0 {
        return Err(Error::Domain("perm_sis needs at least one sample".into()));
    }
    let weights: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| sis_path_log_weight(a, s, k))
        .collect();
    let (log_mean, stderr) = log_mean_and_stderr(&weights);
    Ok(PermResult {
        log_perm: LogReal::from_log(log_mean),
        engine: Engine::Sis,
        est_stderr_log: stderr,
        work: samples * (a.rows() * a.cols()) as u64,
    })
}

/// `ln(mean(exp(w)))` and the standard error of that log (relative
/// standard error of the mean), computed at a common scale.
pub fn log_mean_and_stderr(log_weights: &[f64]) -> (f64, Option<f64>) {
    let count = log_weights.len() as f64;
    let log_mean = log_sum_f64(log_weights) - count.ln();
    if log_weights.len() < 2 || log_mean == f64::NEG_INFINITY {
        return (log_mean, None);
    }
    let mx = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = log_weights.iter().map(|&w| (w - mx).exp()).collect();
    let mean = scaled.iter().sum::<f64>() / count;
    let var = scaled.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (log_mean, Some((var / count).sqrt() / mean))
}

/// Best exact engine for the shape: Ryser for square input, DP otherwise.
pub fn perm_exact(a: &LogMatrix) -> Result<PermResult> {
    if a.is_square() {
        perm_ryser(a)
    } else {
        perm_dp(a)
    }
}

pub fn perm_with(engine: Engine, a: &LogMatrix, samples: u64, s: SeedSpec) -> Result<PermResult> {
    match engine {
        Engine::Brute => perm_brute(a),
        Engine::Ryser => perm_ryser(a),
        Engine::Dp => perm_dp(a),
        Engine::Sis => perm_sis(a, samples, s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(rows: &[&[f64]]) -> LogMatrix {
        LogMatrix::from_linear_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn ones(m: usize, n: usize) -> LogMatrix {
        LogMatrix::from_log_entries(m, n, vec![0.0; m * n]).unwrap()
    }

    #[test]
    fn brute_examples() {
        let r = perm_brute(&lin(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        assert!((r.log_perm.ln() - 10f64.ln()).abs() < 1e-15);
        assert_eq!(r.work, 2);
        assert!((perm_brute(&ones(1, 5)).unwrap().log_perm.ln() - 5f64.ln()).abs() < 1e-15);
        assert!((perm_brute(&ones(2, 3)).unwrap().log_perm.ln() - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn brute_refuses_large() {
        assert!(matches!(perm_brute(&ones(8, 8)), Err(Error::Refused(_))));
        assert!(matches!(perm_brute(&ones(3, 10)), Err(Error::Refused(_))));
        assert!(perm_brute(&ones(7, 9)).is_ok());
    }

    #[test]
    fn ryser_examples() {
        let r = perm_ryser(&lin(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        assert!((r.log_perm.ln() - 10f64.ln()).abs() < 1e-15);
        let r = perm_ryser(&ones(8, 8)).unwrap();
        assert!((r.log_perm.ln() - 40320f64.ln()).abs() < 1e-12);
        assert!((r.log_perm.ln() - 10.6046).abs() < 1e-4);
        let r = perm_ryser(&lin(&[&[3.5]])).unwrap();
        assert!((r.log_perm.ln() - 3.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ryser_rejections() {
        assert!(matches!(perm_ryser(&ones(2, 3)), Err(Error::Domain(_))));
        assert!(matches!(perm_ryser(&ones(25, 25)), Err(Error::Refused(_))));
    }

    #[test]
    fn ryser_segmented_all_ones() {
        // n >= 14 exercises the segmented path.
        for n in [14usize, 16, 18] {
            let r = perm_ryser(&ones(n, n)).unwrap();
            let want = crate::numerics::ln_factorial(n as u64);
            assert!((r.log_perm.ln() - want).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn ryser_zero_cases() {
        let z = LogMatrix::from_log_rows(&[vec![0.0, f64::NEG_INFINITY], vec![0.0, f64::NEG_INFINITY]]).unwrap();
        assert!(perm_ryser(&z).unwrap().log_perm.is_zero());
        assert!(perm_dp(&z).unwrap().log_perm.is_zero());
        assert!(perm_brute(&z).unwrap().log_perm.is_zero());
        let row_zero = LogMatrix::from_log_rows(&[vec![f64::NEG_INFINITY; 2], vec![0.0, 0.0]]).unwrap();
        assert!(perm_ryser(&row_zero).unwrap().log_perm.is_zero());
    }

    #[test]
    fn dp_examples() {
        let r = perm_dp(&ones(2, 3)).unwrap();
        assert!((r.log_perm.ln() - 6f64.ln()).abs() < 1e-15);
        let r = perm_dp(&lin(&[&[2.75]])).unwrap();
        assert!((r.log_perm.ln() - 2.75f64.ln()).abs() < 1e-15);
        let r = perm_dp(&lin(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        assert!((r.log_perm.ln() - 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn dp_budget() {
        assert!(dp_feasible(22, 22));
        assert!(!dp_feasible(23, 23));
        assert!(!dp_feasible(20, 3000));
        assert!(matches!(perm_dp(&ones(23, 23)), Err(Error::Refused(_))));
    }

    #[test]
    fn sis_exhaustive_paths_2x2() {
        // Row 0 picks column 0 w.p. 1/3 (weight 3 * 4 = 12) or column 1
        // w.p. 2/3 (weight 3 * 3 = 9); the expectation is 10.
        let a = lin(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let s = SeedSpec::new(1, 0);
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..200 {
            let w = sis_path_log_weight(&a, s, k).exp();
            seen.insert((w * 1e9).round() as i64);
        }
        let weights: Vec<f64> = seen.iter().map(|&w| w as f64 / 1e9).collect();
        assert_eq!(weights, vec![9.0, 12.0]);
        let expectation = (1.0 / 3.0) * 12.0 + (2.0 / 3.0) * 9.0;
        assert!((expectation - 10.0f64).abs() < 1e-15);
    }

    #[test]
    fn sis_all_ones_has_zero_variance() {
        let r = perm_sis(&ones(6, 6), 50, SeedSpec::new(2, 0)).unwrap();
        assert!((r.log_perm.ln() - 720f64.ln()).abs() < 1e-12);
        assert!(r.est_stderr_log.unwrap() < 1e-12);
    }

    #[test]
    fn sis_is_deterministic() {
        let a = lin(&[&[1.0, 5.0, 2.0], &[0.5, 3.0, 9.0], &[4.0, 1.0, 1.0]]);
        let s = SeedSpec::new(8, 1);
        assert_eq!(perm_sis(&a, 1000, s).unwrap(), perm_sis(&a, 1000, s).unwrap());
        assert!(perm_sis(&a, 0, s).is_err());
    }

    #[test]
    fn engine_text() {
        for e in [Engine::Brute, Engine::Ryser, Engine::Dp, Engine::Sis] {
            assert_eq!(e.to_string().parse::<Engine>().unwrap(), e);
        }
        assert!("fast".parse::<Engine>().is_err());
    }
}
