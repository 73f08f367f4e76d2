//! Random log-matrices, submatrix extraction, and the `.permmat.json` file
//! format.
//!
//! A [`LogMatrix`] always has `m <= n`. Constructors given a taller matrix
//! transpose it (the permanent over injections from the shorter side is
//! unchanged) and record that they did.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::numerics::LogReal;
use crate::randsrc::{sample_log, uniform01, DistSpec, SeedSpec};

/// Where a generated matrix came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub dist: DistSpec,
    pub seed: SeedSpec,
}

/// An `m x n` matrix of natural-log entries, row-major, `1 <= m <= n`.
///
/// Zero entries (`-inf`) are permitted; `NaN` and `+inf` are not.
#[derive(Clone, Debug, PartialEq)]
pub struct LogMatrix {
    m: usize,
    n: usize,
    entries: Vec<f64>,
    provenance: Option<Provenance>,
    transposed: bool,
}

impl LogMatrix {
    /// Builds from row-major log entries of a `rows x cols` matrix.
    /// Transposes when `rows > cols`.
    pub fn from_log_entries(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| x.is_nan() || **x == f64::INFINITY) {
            return Err(Error::Domain(format!("invalid log entry {bad}")));
        }
        let mut a = LogMatrix {
            m: rows,
            n: cols,
            entries,
            provenance: None,
            transposed: false,
        };
        if rows > cols {
            a = a.transpose_raw();
            a.transposed = true;
        }
        Ok(a)
    }

    /// Builds from nested rows of log entries.
    pub fn from_log_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Domain(format!(
                "row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        Self::from_log_entries(rows.len(), cols, rows.concat())
    }

    /// Builds from nested rows of nonnegative linear values.
    pub fn from_linear_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.iter().flatten().any(|&x| !(0.0..f64::INFINITY).contains(&x)) {
            return Err(Error::Domain("linear entries must be finite and nonnegative".into()));
        }
        let logs: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x.ln()).collect()).collect();
        Self::from_log_rows(&logs)
    }

    fn transpose_raw(&self) -> LogMatrix {
        let mut t = vec![0.0; self.entries.len()];
        for i in 0..self.m {
            for j in 0..self.n {
                t[j * self.m + i] = self.entries[i * self.n + j];
            }
        }
        LogMatrix {
            m: self.n,
            n: self.m,
            entries: t,
            provenance: self.provenance.clone(),
            transposed: !self.transposed,
        }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }

    /// Whether a constructor transposed its input to restore `m <= n`.
    pub fn was_transposed(&self) -> bool {
        self.transposed
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    #[inline]
    pub fn log_entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> LogReal {
        LogReal::from_log(self.log_entry(i, j))
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn log_entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_log_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.row(i).to_vec()).collect()
    }

    /// Adds `log_lambda` to every entry, i.e. multiplies the matrix by
    /// `lambda`.
    pub fn scaled(&self, log_lambda: f64) -> LogMatrix {
        let mut out = self.clone();
        out.provenance = None;
        for e in &mut out.entries {
            *e += log_lambda;
        }
        out
    }

    /// Copy with entry `(i, j)` replaced.
    pub fn with_entry(&self, i: usize, j: usize, logval: f64) -> LogMatrix {
        assert!(!logval.is_nan() && logval != f64::INFINITY);
        let mut out = self.clone();
        out.provenance = None;
        out.entries[i * self.n + j] = logval;
        out
    }

    /// Rows and columns reordered: new row `r` is old row `row_perm[r]`,
    /// new column `c` is old column `col_perm[c]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> LogMatrix {
        assert_eq!(row_perm.len(), self.m);
        assert_eq!(col_perm.len(), self.n);
        let mut entries = Vec::with_capacity(self.entries.len());
        for &r in row_perm {
            for &c in col_perm {
                entries.push(self.log_entry(r, c));
            }
        }
        LogMatrix {
            m: self.m,
            n: self.n,
            entries,
            provenance: None,
            transposed: false,
        }
    }

    /// Smallest and largest log entries.
    pub fn log_range(&self) -> (f64, f64) {
        self.entries
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// Entry at the given quantile (nearest rank on the sorted entries).
    pub fn log_quantile(&self, q: f64) -> f64 {
        let mut v = self.entries.clone();
        v.sort_by(f64::total_cmp);
        let idx = ((v.len() - 1) as f64 * q.clamp(0.0, 1.0)).floor() as usize;
        v[idx]
    }
}

/// Strictly increasing row and column index lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmatrixSelector {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl SubmatrixSelector {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::Domain("selector needs at least one row and column".into()));
        }
        if rows.len() > cols.len() {
            return Err(Error::Domain(format!(
                "selector has {} rows but only {} columns",
                rows.len(),
                cols.len()
            )));
        }
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&rows) || !increasing(&cols) {
            return Err(Error::Domain("selector indices must be strictly increasing".into()));
        }
        Ok(SubmatrixSelector { rows, cols })
    }

    pub fn full(a: &LogMatrix) -> Self {
        SubmatrixSelector {
            rows: (0..a.rows()).collect(),
            cols: (0..a.cols()).collect(),
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// The selector that applies `self` and then `inner` (whose indices
    /// refer to the result of `self`).
    pub fn compose(&self, inner: &SubmatrixSelector) -> Result<SubmatrixSelector> {
        let pick = |outer: &[usize], idx: &[usize]| -> Result<Vec<usize>> {
            idx.iter()
                .map(|&k| {
                    outer
                        .get(k)
                        .copied()
                        .ok_or_else(|| Error::Domain(format!("inner index {k} out of range")))
                })
                .collect()
        };
        SubmatrixSelector::new(pick(&self.rows, &inner.rows)?, pick(&self.cols, &inner.cols)?)
    }
}

/// Random `m x n` log-matrix with entry `(i, j) = sample_log(d, uniform01(s, i, j))`.
///
/// `m > n` generates the `m x n` matrix and transposes it.
pub fn generate(m: usize, n: usize, d: &DistSpec, s: SeedSpec) -> Result<LogMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("matrix dimensions must be positive".into()));
    }
    let entries: Vec<f64> = (0..m * n)
        .into_par_iter()
        .map(|k| sample_log(d, uniform01(s, (k / n) as u64, (k % n) as u64)).ln())
        .collect();
    let mut a = LogMatrix::from_log_entries(m, n, entries)?;
    a.provenance = Some(Provenance { dist: d.clone(), seed: s });
    Ok(a)
}

/// The submatrix picked out by `sel`, provenance cleared.
pub fn extract(a: &LogMatrix, sel: &SubmatrixSelector) -> Result<LogMatrix> {
    if sel.rows.last().is_some_and(|&r| r >= a.rows()) || sel.cols.last().is_some_and(|&c| c >= a.cols()) {
        return Err(Error::Domain(format!(
            "selector out of range for a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let mut entries = Vec::with_capacity(sel.rows.len() * sel.cols.len());
    for &r in &sel.rows {
        let row = a.row(r);
        entries.extend(sel.cols.iter().map(|&c| row[c]));
    }
    LogMatrix::from_log_entries(sel.rows.len(), sel.cols.len(), entries)
}

fn fmt_entry(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "null".to_string()
    } else {
        // 17 significant digits round-trip any binary64 exactly.
        format!("{x:.16e}")
    }
}

/// Renders the `.permmat.json` document.
pub fn to_json(a: &LogMatrix) -> String {
    let mut out = String::new();
    let (dist, seed, trial) = match &a.provenance {
        Some(p) => (
            serde_json::to_string(&p.dist.to_string()).expect("string encodes"),
            p.seed.seed.to_string(),
            p.seed.trial.to_string(),
        ),
        None => ("null".into(), "null".into(), "null".into()),
    };
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"m\": {},", a.m);
    let _ = writeln!(out, "  \"n\": {},", a.n);
    let _ = writeln!(out, "  \"dist\": {dist},");
    let _ = writeln!(out, "  \"seed\": {seed},");
    let _ = writeln!(out, "  \"trial\": {trial},");
    let _ = writeln!(out, "  \"log_entries\": [");
    for i in 0..a.m {
        let row: Vec<String> = a.row(i).iter().map(|&x| fmt_entry(x)).collect();
        let sep = if i + 1 < a.m { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    m: usize,
    n: usize,
    dist: Option<String>,
    seed: Option<u64>,
    trial: Option<u64>,
    log_entries: Vec<Vec<Option<f64>>>,
}

/// Parses a `.permmat.json` document. `origin` names the source in errors.
pub fn from_json(text: &str, origin: &Path) -> Result<LogMatrix> {
    let err = |msg: String| Error::MatrixFile {
        path: origin.to_path_buf(),
        msg,
    };
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    if doc.log_entries.len() != doc.m {
        return Err(err(format!(
            "field log_entries: {} rows, but m = {}",
            doc.log_entries.len(),
            doc.m
        )));
    }
    let mut entries = Vec::with_capacity(doc.m * doc.n);
    for (i, row) in doc.log_entries.iter().enumerate() {
        if row.len() != doc.n {
            return Err(err(format!(
                "field log_entries row {i}: {} entries, but n = {}",
                row.len(),
                doc.n
            )));
        }
        entries.extend(row.iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)));
    }
    let mut a = LogMatrix::from_log_entries(doc.m, doc.n, entries).map_err(|e| err(e.to_string()))?;
    if let Some(d) = doc.dist {
        let dist: DistSpec = d.parse().map_err(|e| err(format!("field dist: {e}")))?;
        let seed = doc.seed.ok_or_else(|| err("field seed: required when dist is set".into()))?;
        let trial = doc.trial.ok_or_else(|| err("field trial: required when dist is set".into()))?;
        a.provenance = Some(Provenance {
            dist,
            seed: SeedSpec::new(seed, trial),
        });
    }
    Ok(a)
}

pub fn save(a: &LogMatrix, path: &Path) -> Result<()> {
    fs::write(path, to_json(a)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> Result<LogMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::cell_hash;

    #[test]
    fn point_mass_gives_zero_logs() {
        let a = generate(2, 2, &DistSpec::point(0.0).unwrap(), SeedSpec::new(1, 2)).unwrap();
        assert!(a.log_entries().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn generate_is_deterministic() {
        let d = DistSpec::pareto(2.0).unwrap();
        let a = generate(4, 6, &d, SeedSpec::new(3, 1)).unwrap();
        let b = generate(4, 6, &d, SeedSpec::new(3, 1)).unwrap();
        assert_eq!(a, b);
        let c = generate(4, 6, &d, SeedSpec::new(3, 2)).unwrap();
        assert_ne!(a.log_entries(), c.log_entries());
    }

    #[test]
    fn generate_entry_recomputed_from_mix() {
        let a = generate(3, 3, &DistSpec::pareto(2.0).unwrap(), SeedSpec::new(7, 0)).unwrap();
        // Independent recomputation of the documented mix for cell (0, 0).
        let h = cell_hash(SeedSpec::new(7, 0), 0, 0);
        assert_eq!(h, 0x78F5_012C_333A_EC23);
        let u = ((h >> 12) as f64 + 0.5) / 4_503_599_627_370_496.0;
        assert_eq!(a.log_entry(0, 0), -2.0 * u.ln());
        assert!((a.log_entry(0, 0) - 1.499_483_855_311_506_4).abs() < 1e-15);
    }

    #[test]
    fn tall_generation_transposes() {
        let d = DistSpec::pareto(1.0).unwrap();
        let s = SeedSpec::new(9, 0);
        let a = generate(5, 3, &d, s).unwrap();
        assert_eq!((a.rows(), a.cols()), (3, 5));
        assert!(a.was_transposed());
        assert_eq!(a.log_entry(1, 4), sample_log(&d, uniform01(s, 4, 1)).ln());
    }

    #[test]
    fn generation_is_cell_independent() {
        let d = DistSpec::ExpRate1;
        let s = SeedSpec::new(21, 4);
        let big = generate(6, 9, &d, s).unwrap();
        let small = generate(3, 5, &d, s).unwrap();
        for i in 0..3 {
            for j in 0..5 {
                assert_eq!(big.log_entry(i, j), small.log_entry(i, j));
            }
        }
    }

    #[test]
    fn extract_cases() {
        let a = generate(3, 4, &DistSpec::ExpRate1, SeedSpec::new(1, 1)).unwrap();
        let full = extract(&a, &SubmatrixSelector::full(&a)).unwrap();
        assert_eq!(full.log_entries(), a.log_entries());
        assert!(full.provenance().is_none());

        let one = extract(&a, &SubmatrixSelector::new(vec![2], vec![1]).unwrap()).unwrap();
        assert_eq!((one.rows(), one.cols()), (1, 1));
        assert_eq!(one.log_entry(0, 0), a.log_entry(2, 1));

        let bad = SubmatrixSelector::new(vec![0], vec![4]).unwrap();
        assert!(extract(&a, &bad).is_err());
        assert!(SubmatrixSelector::new(vec![1, 0], vec![0, 1]).is_err());
        assert!(SubmatrixSelector::new(vec![0, 1, 2], vec![0, 1]).is_err());
    }

    #[test]
    fn extract_complement_partitions_block_entries() {
        let a = generate(5, 5, &DistSpec::pareto(0.5).unwrap(), SeedSpec::new(2, 0)).unwrap();
        let b = SubmatrixSelector::new(vec![0, 2], vec![1, 3]).unwrap();
        let bc = SubmatrixSelector::new(vec![1, 3, 4], vec![0, 2, 4]).unwrap();
        let eb = extract(&a, &b).unwrap();
        let ebc = extract(&a, &bc).unwrap();
        let mut seen = [0u8; 25];
        for (sel, m) in [(&b, &eb), (&bc, &ebc)] {
            for (ri, &r) in sel.rows().iter().enumerate() {
                for (ci, &c) in sel.cols().iter().enumerate() {
                    assert_eq!(m.log_entry(ri, ci), a.log_entry(r, c));
                    seen[r * 5 + c] += 1;
                }
            }
        }
        // Each block-diagonal cell is covered once, off-block cells never.
        assert_eq!(seen.iter().filter(|&&x| x == 1).count(), 4 + 9);
        assert!(seen.iter().all(|&x| x <= 1));
    }

    #[test]
    fn extract_composes() {
        let a = generate(6, 8, &DistSpec::pareto(1.5).unwrap(), SeedSpec::new(4, 0)).unwrap();
        let s1 = SubmatrixSelector::new(vec![0, 2, 3, 5], vec![1, 2, 4, 6, 7]).unwrap();
        let s2 = SubmatrixSelector::new(vec![1, 3], vec![0, 2, 4]).unwrap();
        let twice = extract(&extract(&a, &s1).unwrap(), &s2).unwrap();
        let once = extract(&a, &s1.compose(&s2).unwrap()).unwrap();
        assert_eq!(twice.log_entries(), once.log_entries());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let a = generate(3, 4, &DistSpec::pareto(2.0).unwrap(), SeedSpec::new(5, 6)).unwrap();
        let text = to_json(&a);
        let b = from_json(&text, Path::new("mem")).unwrap();
        assert_eq!(a.rows(), b.rows());
        for (x, y) in a.log_entries().iter().zip(b.log_entries()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(b.provenance(), a.provenance());
    }

    #[test]
    fn json_tall_file_transposes() {
        let text = r#"{"m": 3, "n": 2, "dist": null, "seed": null, "trial": null,
            "log_entries": [[1.0, 2.0], [3.0, 4.0], [5.0, null]]}"#;
        let a = from_json(text, Path::new("mem")).unwrap();
        assert!(a.was_transposed());
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert_eq!(a.log_entry(0, 2), 5.0);
        assert_eq!(a.log_entry(1, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn json_errors_name_the_field() {
        let text = r#"{"m": 2, "n": 2, "dist": null, "seed": null, "trial": null,
            "log_entries": [[1.0, 2.0], [3.0]]}"#;
        let e = from_json(text, Path::new("x.permmat.json")).unwrap_err().to_string();
        assert!(e.contains("log_entries row 1"), "{e}");

        let e = from_json("{\"m\": 2,\n \"n\": oops}", Path::new("y")).unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");

        let text = r#"{"m": 1, "n": 1, "dist": "pareto:beta=-1", "seed": 1, "trial": 0,
            "log_entries": [[0.0]]}"#;
        let e = from_json(text, Path::new("z")).unwrap_err().to_string();
        assert!(e.contains("field dist"), "{e}");
    }

    #[test]
    fn seventeen_digit_entries_roundtrip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567, f64::MIN_POSITIVE] {
            let s = fmt_entry(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let parsed: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }
}
