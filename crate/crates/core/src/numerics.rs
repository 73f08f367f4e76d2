//! Log-domain scalars and compensated accumulation.
//!
//! All logarithms are natural. Zero is encoded as a log of negative
//! infinity, so it is the identity of [`log_add`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

/// A nonnegative real stored as its natural logarithm.
///
/// The stored value is never NaN; `-inf` encodes zero.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    /// Wraps a natural-log value.
    ///
    /// Panics if `logval` is NaN.
    pub fn from_log(logval: f64) -> Self {
        assert!(!logval.is_nan(), "LogReal cannot hold NaN");
        LogReal(logval)
    }

    pub fn try_from_log(logval: f64) -> Option<Self> {
        (!logval.is_nan()).then_some(LogReal(logval))
    }

    /// Panics on negative or NaN input.
    pub fn from_linear(x: f64) -> Self {
        assert!(x >= 0.0, "LogReal encodes nonnegative reals only, got {x}");
        LogReal(x.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    /// Linear value; overflows to `inf` past ~709.78 nats.
    pub fn to_linear(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self^k` for real `k`.
    pub fn powf(self, k: f64) -> Self {
        if self.is_zero() {
            if k > 0.0 {
                return LogReal::ZERO;
            }
            return LogReal::ONE;
        }
        LogReal::from_log(self.0 * k)
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogReal(ln={})", self.0)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

impl Eq for LogReal {}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        // 0 * inf is not representable as a nonnegative real; treat as 0.
        if self.is_zero() || rhs.is_zero() {
            return LogReal::ZERO;
        }
        LogReal(self.0 + rhs.0)
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        log_add(self, rhs)
    }
}

impl std::iter::Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        let v: Vec<LogReal> = iter.collect();
        log_sum(&v)
    }
}

impl std::iter::Product for LogReal {
    fn product<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        iter.fold(LogReal::ONE, |acc, x| acc * x)
    }
}

/// A real number carried as sign and log-magnitude.
///
/// `sign == 0` exactly when `logmag == -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogReal {
    sign: i8,
    logmag: f64,
}

impl SignedLogReal {
    pub const ZERO: SignedLogReal = SignedLogReal {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };

    /// Builds a value from a sign in `{-1, 0, 1}` and a log-magnitude.
    /// A zero sign or `-inf` magnitude both produce [`SignedLogReal::ZERO`].
    pub fn new(sign: i8, logmag: f64) -> Self {
        assert!(!logmag.is_nan(), "SignedLogReal cannot hold NaN");
        assert!((-1..=1).contains(&sign), "sign must be -1, 0 or 1");
        if sign == 0 || logmag == f64::NEG_INFINITY {
            return SignedLogReal::ZERO;
        }
        SignedLogReal { sign, logmag }
    }

    pub fn positive(mag: LogReal) -> Self {
        SignedLogReal::new(1, mag.ln())
    }

    pub fn negative(mag: LogReal) -> Self {
        SignedLogReal::new(-1, mag.ln())
    }

    pub fn from_linear(x: f64) -> Self {
        assert!(!x.is_nan());
        if x == 0.0 {
            return SignedLogReal::ZERO;
        }
        SignedLogReal::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn logmag(self) -> f64 {
        self.logmag
    }

    pub fn magnitude(self) -> LogReal {
        LogReal(self.logmag)
    }

    pub fn to_linear(self) -> f64 {
        f64::from(self.sign) * self.logmag.exp()
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Adds another partial sum, keeping both compensation terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

/// Linear-domain signed accumulator with separate compensated buckets for
/// positive and negative terms, combined once at the end.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoBucketSum {
    pos: CompensatedSum,
    neg: CompensatedSum,
}

impl TwoBucketSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x >= 0.0 {
            self.pos.add(x);
        } else {
            self.neg.add(-x);
        }
    }

    pub fn merge(&mut self, other: &TwoBucketSum) {
        self.pos.merge(&other.pos);
        self.neg.merge(&other.neg);
    }

    /// Largest bucket magnitude; the scale against which cancellation is
    /// measured.
    pub fn bucket_scale(&self) -> f64 {
        self.pos.value().max(self.neg.value())
    }

    pub fn value(&self) -> f64 {
        let (ps, pc) = self.pos.parts();
        let (ns, nc) = self.neg.parts();
        (ps - ns) + (pc - nc)
    }
}

/// `log(exp(a) + exp(b))`, bit-exactly commutative.
pub fn log_add(a: LogReal, b: LogReal) -> LogReal {
    let (hi, lo) = if a.0 >= b.0 { (a.0, b.0) } else { (b.0, a.0) };
    if lo == f64::NEG_INFINITY || hi == f64::INFINITY {
        return LogReal(hi);
    }
    LogReal(hi + (lo - hi).exp().ln_1p())
}

/// Log of the sum of `values`. The empty sum is zero (`-inf`).
///
/// One occurrence of the maximum contributes exactly one; the remaining
/// scaled exponentials are summed with compensation and folded in through
/// `ln_1p`, so tiny tails such as `[0, -50]` are not lost.
pub fn log_sum(values: &[LogReal]) -> LogReal {
    let Some((imax, max)) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .map(|(i, v)| (i, v.0))
    else {
        return LogReal::ZERO;
    };
    if max.is_infinite() {
        return LogReal(max);
    }
    let mut rest = CompensatedSum::new();
    for (i, v) in values.iter().enumerate() {
        if i != imax {
            rest.add((v.0 - max).exp());
        }
    }
    LogReal(max + rest.value().ln_1p())
}

/// Log of the sum of raw log values. Convenience for kernels that keep
/// plain `f64` logs.
pub fn log_sum_f64(values: &[f64]) -> f64 {
    let Some((imax, &max)) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(&x.0)))
    else {
        return f64::NEG_INFINITY;
    };
    if max.is_infinite() {
        return max;
    }
    let mut rest = CompensatedSum::new();
    for (i, v) in values.iter().enumerate() {
        if i != imax {
            rest.add((v - max).exp());
        }
    }
    max + rest.value().ln_1p()
}

/// Signed sum of log-magnitude terms.
///
/// Positive and negative terms are scaled by the largest magnitude and
/// accumulated in separate compensated buckets. When the true result is at
/// least `1e-7` times the largest term, the relative error stays below
/// `1e-9`. Exact cancellation returns [`SignedLogReal::ZERO`].
pub fn signed_accumulate(terms: &[SignedLogReal]) -> SignedLogReal {
    let scale = terms
        .iter()
        .filter(|t| t.sign != 0)
        .map(|t| t.logmag)
        .fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return SignedLogReal::ZERO;
    }
    let mut acc = TwoBucketSum::new();
    for t in terms.iter().filter(|t| t.sign != 0) {
        acc.add(f64::from(t.sign) * (t.logmag - scale).exp());
    }
    let v = acc.value();
    if v == 0.0 {
        return SignedLogReal::ZERO;
    }
    SignedLogReal::new(if v > 0.0 { 1 } else { -1 }, v.abs().ln() + scale)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // Reflection keeps the series in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln(n!)`. Exact integer products up to `n = 34`, Lanczos beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 34 {
        let f: u128 = (1..=u128::from(n)).product();
        return (f as f64).ln();
    }
    ln_gamma(n as f64 + 1.0)
}

/// `ln(n! / (n - k)!)`, the log count of injections of `k` items into `n`.
pub fn ln_falling_factorial(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    if n <= 34 {
        let f: u128 = ((n - k + 1)..=n).map(u128::from).product();
        return (f as f64).ln();
    }
    ln_factorial(n) - ln_factorial(n - k)
}
