//! Checkable lower and upper bounds on `ln perm` for matrices too large
//! for the exact engines, plus the 0-1 matching tools they rest on.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixgen::{extract, LogMatrix, SubmatrixSelector};
use crate::numerics::{ln_factorial, ln_falling_factorial, log_sum_f64, LogReal};
use crate::permcore::{perm_ryser, RYSER_MAX_N};
use crate::randsrc::{uniform01, SeedSpec};

/// 0-1 matrix with at most as many rows as columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl BinaryMatrix {
    pub fn new(m: usize, n: usize, bits: Vec<bool>) -> Result<Self> {
        if m > n {
            return Err(Error::Domain(format!("binary matrix needs rows <= cols, got {m}x{n}")));
        }
        if bits.len() != m * n {
            return Err(Error::Domain(format!("expected {} bits, got {}", m * n, bits.len())));
        }
        Ok(BinaryMatrix { m, n, bits })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("ragged binary rows".into()));
        }
        Self::new(m, n, rows.iter().flatten().map(|&b| b != 0).collect())
    }

    /// Low bit of `mask` is cell (0,0), row-major.
    pub fn from_mask(m: usize, n: usize, mask: u64) -> Result<Self> {
        Self::new(m, n, (0..m * n).map(|b| mask >> b & 1 == 1).collect())
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.bits[i * self.n..(i + 1) * self.n].iter().filter(|&&b| b).count()
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> BinaryMatrix {
        let mut bits = Vec::with_capacity(self.bits.len());
        for &r in row_perm {
            for &c in col_perm {
                bits.push(self.get(r, c));
            }
        }
        BinaryMatrix { m: self.m, n: self.n, bits }
    }

    /// 0/1 entries as a log matrix (`-inf` for zero).
    pub fn to_log_matrix(&self) -> LogMatrix {
        let entries = self.bits.iter().map(|&b| if b { 0.0 } else { f64::NEG_INFINITY }).collect();
        LogMatrix::from_log_entries(self.m, self.n, entries).expect("rows <= cols")
    }
}

/// Bit `(i, j)` is set iff `a[i][j] >= q`. A tall input has already been
/// transposed by [`LogMatrix`], so the result always has rows <= cols.
pub fn threshold(a: &LogMatrix, log_q: f64) -> BinaryMatrix {
    BinaryMatrix {
        m: a.rows(),
        n: a.cols(),
        bits: a.log_entries().iter().map(|&x| x >= log_q).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallReport {
    pub saturated: bool,
    /// Column of each row, when saturated.
    pub matching: Option<Vec<usize>>,
    /// Rows with fewer neighbours than members, when unsaturated.
    pub violating_set: Option<Vec<usize>>,
    pub neighborhood: Option<Vec<usize>>,
}

/// Maximum bipartite matching by augmenting paths. When some row stays
/// unmatched, the rows reachable from it along alternating paths form a
/// Hall violator: their neighbourhood is exactly the matched columns met
/// on the way, one fewer than the rows.
pub fn hall_check(b: &BinaryMatrix) -> HallReport {
    let (m, n) = (b.m, b.n);
    let adj: Vec<Vec<usize>> = (0..m).map(|i| (0..n).filter(|&j| b.get(i, j)).collect()).collect();
    let mut row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut col_of_row: Vec<Option<usize>> = vec![None; m];

    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        row_of_col: &mut [Option<usize>],
        col_of_row: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match row_of_col[j] {
                None => true,
                Some(r) => augment(r, adj, seen, row_of_col, col_of_row),
            };
            if free {
                row_of_col[j] = Some(i);
                col_of_row[i] = Some(j);
                return true;
            }
        }
        false
    }

    for i in 0..m {
        let mut seen = vec![false; n];
        augment(i, &adj, &mut seen, &mut row_of_col, &mut col_of_row);
    }

    match col_of_row.iter().position(Option::is_none) {
        None => HallReport {
            saturated: true,
            matching: Some(col_of_row.into_iter().map(|c| c.expect("matched")).collect()),
            violating_set: None,
            neighborhood: None,
        },
        Some(start) => {
            let mut in_set = vec![false; m];
            let mut col_seen = vec![false; n];
            let mut queue = VecDeque::from([start]);
            in_set[start] = true;
            while let Some(i) = queue.pop_front() {
                for &j in &adj[i] {
                    if col_seen[j] {
                        continue;
                    }
                    col_seen[j] = true;
                    // Maximality: every neighbour of a reachable row is matched.
                    let r = row_of_col[j].expect("maximum matching");
                    if !in_set[r] {
                        in_set[r] = true;
                        queue.push_back(r);
                    }
                }
            }
            HallReport {
                saturated: false,
                matching: None,
                violating_set: Some((0..m).filter(|&i| in_set[i]).collect()),
                neighborhood: Some((0..n).filter(|&j| col_seen[j]).collect()),
            }
        }
    }
}

/// `ln(k!/(k-m)!)` when every row has at least `k >= m` ones, `ln k!` when
/// `k < m`, where `k` is the smallest row count. Needs a saturated matrix.
pub fn mann_ryser_bound(b: &BinaryMatrix) -> Result<LogReal> {
    if !hall_check(b).saturated {
        return Err(Error::Domain("Mann-Ryser bound needs a saturated 0-1 matrix".into()));
    }
    Ok(LogReal::from_log(mann_ryser_value(b)))
}

fn mann_ryser_value(b: &BinaryMatrix) -> f64 {
    let m = b.m as u64;
    let k = (0..b.m).map(|i| b.row_count(i)).min().unwrap_or(0) as u64;
    if k >= m {
        ln_falling_factorial(k, m)
    } else {
        ln_factorial(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GreedyHall,
    Rowsum,
    RowmaxFactorial,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::GreedyHall => "greedy_hall",
            Method::Rowsum => "rowsum",
            Method::RowmaxFactorial => "rowmax_factorial",
        })
    }
}

/// Greedy step: row `row` matched to column `col` with entry `log_value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
    pub log_value: f64,
}

/// How the rows left after the greedy steps were bounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemainderBound {
    /// Thresholded at `log_q`; `matching` (original column per remaining
    /// row, all entries `>= log_q`) proves saturation.
    Threshold { log_q: f64, matching: Vec<usize> },
    /// One injection continuing the greedy, original column per row.
    Injection { cols: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Greedy { pivots: Vec<Pivot>, remainder: RemainderBound },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub side: Side,
    pub log_bound: f64,
    pub method: Method,
    pub witness: Witness,
}

impl Certificate {
    /// Short text form for CSV cells, e.g. `cols=3/0/1;q=-0.25;match=2`.
    pub fn witness_digest(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join("/");
        match &self.witness {
            Witness::None => String::new(),
            Witness::Greedy { pivots, remainder } => {
                let cols: Vec<usize> = pivots.iter().map(|p| p.col).collect();
                match remainder {
                    RemainderBound::Threshold { log_q, matching } => {
                        format!("cols={};q={log_q};match={}", join(&cols), join(matching))
                    }
                    RemainderBound::Injection { cols: rest } => {
                        format!("cols={};inject={}", join(&cols), join(rest))
                    }
                }
            }
        }
    }
}

/// Greedy pivots for rows `0..steps`: each row takes its largest entry among
/// unused columns, lowest column on ties.
pub fn greedy_pivots(a: &LogMatrix, steps: usize) -> Vec<Pivot> {
    let mut used = vec![false; a.cols()];
    let mut pivots = Vec::with_capacity(steps);
    for i in 0..steps.min(a.rows()) {
        let row = a.row(i);
        let mut best: Option<usize> = None;
        for j in 0..a.cols() {
            if !used[j] && best.is_none_or(|b| row[j] > row[b]) {
                best = Some(j);
            }
        }
        let j = best.expect("rows <= cols leaves a free column");
        used[j] = true;
        pivots.push(Pivot { row: i, col: j, log_value: row[j] });
    }
    pivots
}

/// Lower bound from `floor(rho m)` greedy pivots and a bound on the rows left.
///
/// Expanding the permanent along a row shows `perm A >= a_ij perm A_(ij)`
/// for any cell, so the pivots contribute their product. The remaining
/// block `R` is bounded two ways and the larger is kept: by one greedy
/// injection, and, when thresholding `R` at `q` leaves a saturated 0-1
/// matrix `B`, by `q^(rows of R) perm B` with `perm B` bounded by
/// Mann-Ryser.
pub fn lower_certificate(a: &LogMatrix, rho: f64, log_q: f64) -> Result<Certificate> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    if log_q.is_nan() {
        return Err(Error::Domain("threshold log_q is NaN".into()));
    }
    let m = a.rows();
    let steps = (rho * m as f64).floor() as usize;
    let pivots = greedy_pivots(a, m);
    let (head, tail) = pivots.split_at(steps);
    let head_sum: f64 = head.iter().map(|p| p.log_value).sum();

    let injection_bound: f64 = tail.iter().map(|p| p.log_value).sum();
    let mut best = (injection_bound, RemainderBound::Injection { cols: tail.iter().map(|p| p.col).collect() });

    if log_q > f64::NEG_INFINITY && !tail.is_empty() {
        let used: Vec<usize> = head.iter().map(|p| p.col).collect();
        let rest_rows: Vec<usize> = (steps..m).collect();
        let rest_cols: Vec<usize> = (0..a.cols()).filter(|j| !used.contains(j)).collect();
        let sel = SubmatrixSelector::new(rest_rows, rest_cols.clone())?;
        let bits = threshold(&extract(a, &sel)?, log_q);
        let report = hall_check(&bits);
        if let Some(matching) = report.matching {
            let bound = (m - steps) as f64 * log_q + mann_ryser_value(&bits);
            if bound > best.0 {
                best = (
                    bound,
                    RemainderBound::Threshold {
                        log_q,
                        matching: matching.iter().map(|&c| rest_cols[c]).collect(),
                    },
                );
            }
        }
    }
    Ok(Certificate {
        side: Side::Lower,
        log_bound: head_sum + best.0,
        method: Method::GreedyHall,
        witness: Witness::Greedy { pivots: head.to_vec(), remainder: best.1 },
    })
}

/// `sum_i ln(row sum_i)`: the product of row sums expands into every
/// injection term plus further nonnegative terms.
pub fn rowsum_bound(a: &LogMatrix) -> f64 {
    (0..a.rows()).map(|i| log_sum_f64(a.row(i))).sum()
}

/// `ln(n!/(n-m)!) + sum_i ln(row max_i)`: each of the injections has a
/// product no larger than the product of row maxima.
pub fn rowmax_factorial_bound(a: &LogMatrix) -> f64 {
    let maxima: f64 = (0..a.rows())
        .map(|i| a.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum();
    ln_falling_factorial(a.cols() as u64, a.rows() as u64) + maxima
}

/// Row-sum upper bound.
pub fn upper_certificate(a: &LogMatrix) -> Certificate {
    Certificate {
        side: Side::Upper,
        log_bound: rowsum_bound(a),
        method: Method::Rowsum,
        witness: Witness::None,
    }
}

/// The smaller of the row-sum and row-max-factorial upper bounds.
pub fn tight_upper_certificate(a: &LogMatrix) -> Certificate {
    let rowsum = rowsum_bound(a);
    let rowmax = rowmax_factorial_bound(a);
    let (log_bound, method) = if rowmax < rowsum {
        (rowmax, Method::RowmaxFactorial)
    } else {
        (rowsum, Method::Rowsum)
    };
    Certificate { side: Side::Upper, log_bound, method, witness: Witness::None }
}

/// Recomputes a certificate's bound from the matrix and its witness alone.
/// Returns the recomputed bound, or an error naming the first defect.
pub fn verify(a: &LogMatrix, cert: &Certificate) -> Result<f64> {
    let bad = |msg: String| Err(Error::Domain(format!("certificate rejected: {msg}")));
    let recomputed = match (&cert.side, &cert.method, &cert.witness) {
        (Side::Upper, Method::Rowsum, Witness::None) => rowsum_bound(a),
        (Side::Upper, Method::RowmaxFactorial, Witness::None) => rowmax_factorial_bound(a),
        (Side::Lower, Method::GreedyHall, Witness::Greedy { pivots, remainder }) => {
            let mut used = vec![false; a.cols()];
            let mut take = |row: usize, col: usize| -> Result<f64> {
                if row >= a.rows() || col >= a.cols() || used[col] {
                    return Err(Error::Domain(format!("certificate rejected: cell ({row}, {col}) reused or out of range")));
                }
                used[col] = true;
                Ok(a.log_entry(row, col))
            };
            let mut total = 0.0;
            for (i, p) in pivots.iter().enumerate() {
                if p.row != i {
                    return bad(format!("pivot {i} is on row {}", p.row));
                }
                let value = take(p.row, p.col)?;
                if value.to_bits() != p.log_value.to_bits() {
                    return bad(format!("pivot {i} value does not match the matrix"));
                }
                total += value;
            }
            let first_rest = pivots.len();
            let rest_rows = a.rows() - first_rest;
            match remainder {
                RemainderBound::Injection { cols } => {
                    if cols.len() != rest_rows {
                        return bad("injection does not cover the remaining rows".into());
                    }
                    let mut sum = 0.0;
                    for (r, &c) in cols.iter().enumerate() {
                        sum += take(first_rest + r, c)?;
                    }
                    total + sum
                }
                RemainderBound::Threshold { log_q, matching } => {
                    if matching.len() != rest_rows {
                        return bad("matching does not cover the remaining rows".into());
                    }
                    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.col).collect();
                    for (r, &c) in matching.iter().enumerate() {
                        if take(first_rest + r, c)? < *log_q {
                            return bad(format!("matched cell ({}, {c}) is below the threshold", first_rest + r));
                        }
                    }
                    let rest_cols: Vec<usize> = (0..a.cols()).filter(|j| !pivot_cols.contains(j)).collect();
                    let sel = SubmatrixSelector::new((first_rest..a.rows()).collect(), rest_cols)?;
                    let bits = threshold(&extract(a, &sel)?, *log_q);
                    total + rest_rows as f64 * log_q + mann_ryser_value(&bits)
                }
            }
        }
        _ => return bad("side, method and witness do not fit together".into()),
    };
    let tol = 1e-12 * recomputed.abs().max(1.0);
    if recomputed.is_finite() && (recomputed - cert.log_bound).abs() > tol
        || !recomputed.is_finite() && recomputed != cert.log_bound
    {
        return bad(format!("claimed {} but witness gives {recomputed}", cert.log_bound));
    }
    Ok(recomputed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub k: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub log_perm: f64,
    /// `ln perm B / (k ln k)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_witness: ScanRecord,
    pub max_witness: ScanRecord,
    pub records: Vec<ScanRecord>,
}

/// Combinations of `n` choose `k`, saturating.
fn choose(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Sorted uniform `k`-subset of `0..n` by a partial Fisher-Yates shuffle
/// driven by `(stream, sample, step)` uniforms.
fn random_subset(n: usize, k: usize, stream: SeedSpec, sample: u64, offset: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for t in 0..k {
        let u = uniform01(stream, sample, offset + t as u64);
        let pick = t + ((u * (n - t) as f64) as usize).min(n - t - 1);
        pool.swap(t, pick);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Exhaustive scan of `k x k` submatrices when `C(n,k)^2 <= 1e5`, else
/// `samples` random selectors for each `k` in `[ceil(alpha n), n]`.
/// `k = 1` is skipped since `k ln k = 0` there.
pub fn submatrix_scan(a: &LogMatrix, alpha: f64, samples: u64, s: SeedSpec) -> Result<ScanReport> {
    if !a.is_square() {
        return Err(Error::Domain("submatrix scan needs a square matrix".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = a.rows();
    if n > RYSER_MAX_N {
        return Err(Error::Refused(format!(
            "submatrix scan evaluates the full matrix exactly; n = {n} exceeds {RYSER_MAX_N}"
        )));
    }
    let k_lo = ((alpha * n as f64).ceil() as usize).max(2);
    if k_lo > n {
        return Err(Error::Domain(format!("no submatrix size in [{k_lo}, {n}]")));
    }
    let mut selectors: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for k in k_lo..=n {
        let combos = choose(n, k);
        if combos.saturating_mul(combos) <= 100_000 {
            let subsets = all_subsets(n, k);
            for r in &subsets {
                for c in &subsets {
                    selectors.push((k, r.clone(), c.clone()));
                }
            }
        } else {
            let stream = s.substream(k as u64);
            for t in 0..samples {
                let rows = random_subset(n, k, stream, t, 0);
                let cols = random_subset(n, k, stream, t, n as u64);
                selectors.push((k, rows, cols));
            }
        }
    }
    let records: Vec<ScanRecord> = selectors
        .into_par_iter()
        .map(|(k, rows, cols)| {
            let sel = SubmatrixSelector::new(rows.clone(), cols.clone())?;
            let log_perm = perm_ryser(&extract(a, &sel)?)?.log_perm.ln();
            Ok(ScanRecord { k, rows, cols, log_perm, ratio: log_perm / (k as f64 * (k as f64).ln()) })
        })
        .collect::<Result<_>>()?;
    let first = |better: fn(f64, f64) -> bool| {
        records.iter().fold(&records[0], |best, r| if better(r.ratio, best.ratio) { r } else { best }).clone()
    };
    let min_witness = first(|x, y| x < y);
    let max_witness = first(|x, y| x > y);
    Ok(ScanReport {
        min_ratio: min_witness.ratio,
        max_ratio: max_witness.ratio,
        min_witness,
        max_witness,
        records,
    })
}
