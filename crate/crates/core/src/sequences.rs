//! Weight sequences `α(n)`: construction from growth functions and Bell
//! numbers, exponential generating functions, log-shape predicates, sequence
//! equivalence, and CSV import/export.

use std::fmt;
use std::io::{BufRead, Write};

use serde::Serialize;
use thiserror::Error;

use crate::growth::{ClassTag, GrowthFunction};
use crate::legendre::{legendre_table, LegendreError, LegendreTable};
use crate::numerics::{ln_factorial, logsumexp_series, LogValue, NumericsError, SeriesResult, DEFAULT_SERIES_TOL, DEFAULT_SLACK};
use crate::verdict::Verdict;

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Legendre(#[from] LegendreError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("sequence has {len} entries, need at least {need}")]
    TooShort { len: usize, need: usize },
    #[error("sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("entry {n} is not finite")]
    NonFinite { n: usize },
    #[error("coefficient profile shows no decay over n = {from}..{to}")]
    DivergentProfile { from: usize, to: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where an [`AlphaSequence`] came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Provenance {
    FromGrowth(String),
    Bell(u32),
    User(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::FromGrowth(u) => write!(f, "fromGrowth({u})"),
            Provenance::Bell(k) => write!(f, "bell({k})"),
            Provenance::User(l) => write!(f, "user({l})"),
        }
    }
}

impl Provenance {
    fn parse(s: &str) -> Provenance {
        let inner = |p: &str| s.strip_prefix(p).and_then(|r| r.strip_suffix(')'));
        if let Some(u) = inner("fromGrowth(") {
            Provenance::FromGrowth(u.to_string())
        } else if let Some(k) = inner("bell(").and_then(|k| k.parse().ok()) {
            Provenance::Bell(k)
        } else if let Some(l) = inner("user(") {
            Provenance::User(l.to_string())
        } else {
            Provenance::User(s.to_string())
        }
    }
}

/// `{log α(n)}` for `n = 0..=N`.
#[derive(Debug, Clone)]
pub struct AlphaSequence {
    pub log_alpha: Vec<LogValue>,
    pub provenance: Provenance,
    /// The growth function, when the sequence was built from one.
    pub source: Option<GrowthFunction>,
}

impl AlphaSequence {
    /// A user-supplied sequence given as natural logs.
    pub fn from_logs(label: impl Into<String>, logs: Vec<f64>) -> Result<Self, SequenceError> {
        if let Some(n) = logs.iter().position(|v| !v.is_finite()) {
            return Err(SequenceError::NonFinite { n });
        }
        Ok(AlphaSequence {
            log_alpha: logs.into_iter().map(LogValue::from_ln).collect(),
            provenance: Provenance::User(label.into()),
            source: None,
        })
    }

    pub fn n_max(&self) -> usize {
        self.log_alpha.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.log_alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_alpha.is_empty()
    }

    pub fn logs(&self) -> Vec<f64> {
        self.log_alpha.iter().map(|v| v.ln()).collect()
    }

    /// `log γ(n) = log α(n) - log n!`.
    pub fn log_gamma(&self) -> Vec<f64> {
        self.log_alpha.iter().enumerate().map(|(n, v)| v.ln() - ln_factorial(n)).collect()
    }

    /// `log (1 / (n! α(n)))`.
    pub fn log_inv_factorial_alpha(&self) -> Vec<f64> {
        self.log_alpha.iter().enumerate().map(|(n, v)| -v.ln() - ln_factorial(n)).collect()
    }

    /// The first `n_max + 1` entries.
    pub fn truncated(&self, n_max: usize) -> AlphaSequence {
        let mut s = self.clone();
        s.log_alpha.truncate(n_max + 1);
        s
    }

    /// Writes `n,log_value` rows after a `# provenance=...` comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), SequenceError> {
        writeln!(w, "# provenance={}", self.provenance)?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["n", "log_value"]).map_err(|e| SequenceError::Csv(e.to_string()))?;
        for (n, v) in self.log_alpha.iter().enumerate() {
            csv.write_record([n.to_string(), format!("{:?}", v.ln())])
                .map_err(|e| SequenceError::Csv(e.to_string()))?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`write_csv`](Self::write_csv).
    ///
    /// Rows must list `n = 0, 1, 2, ...` in order.
    pub fn read_csv<R: BufRead>(mut r: R) -> Result<Self, SequenceError> {
        let mut first = String::new();
        r.read_line(&mut first)?;
        let provenance = first
            .trim()
            .strip_prefix("# provenance=")
            .map(Provenance::parse)
            .ok_or_else(|| SequenceError::Csv("missing '# provenance=' header line".into()))?;
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
        let mut logs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| SequenceError::Csv(e.to_string()))?;
            let n: usize = rec
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| SequenceError::Csv(format!("row {}: bad index", i + 1)))?;
            if n != i {
                return Err(SequenceError::Csv(format!("row {}: expected n = {i}, found {n}", i + 1)));
            }
            let v: f64 = rec
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| SequenceError::Csv(format!("row {}: bad log_value", i + 1)))?;
            logs.push(v);
        }
        let mut seq = AlphaSequence::from_logs("", logs)?;
        seq.provenance = provenance;
        Ok(seq)
    }
}

/// `α(n) = 1 / (ℓ_u(n) n!)` from an existing table.
pub fn alpha_from_table(table: &LegendreTable) -> AlphaSequence {
    AlphaSequence {
        log_alpha: table
            .log_ell
            .iter()
            .enumerate()
            .map(|(n, l)| LogValue::from_ln(-l.ln() - ln_factorial(n)))
            .collect(),
        provenance: Provenance::FromGrowth(table.source.to_string()),
        source: Some(table.source.clone()),
    }
}

/// `α(n) = 1 / (ℓ_u(n) n!)` for `n = 0..=N`.
pub fn alpha_from_growth(u: &GrowthFunction, n_max: usize) -> Result<AlphaSequence, SequenceError> {
    let table = legendre_table(u, n_max)?;
    let mut seq = alpha_from_table(&table);
    if u.claims_class(ClassTag::U0) {
        // inf u = 1 makes α(0) = 1 exactly; drop optimizer noise
        seq.log_alpha[0] = LogValue::ONE;
    }
    Ok(seq)
}

/// Which generating function [`egf_eval`] sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Egf {
    /// `G_α(r) = Σ α(n) r^n / n!`
    Alpha,
    /// `G_{1/α}(r) = Σ r^n / (n! α(n))`
    InvAlpha,
}

fn check_root_decay(logs: &[f64]) -> Result<(), SequenceError> {
    let n = logs.len();
    if n < 4 {
        return Ok(());
    }
    let from = (n - 1) - (n - 1) / 3;
    let root = |i: usize| logs[i] / i as f64;
    if root(n - 1) < root(from) {
        Ok(())
    } else {
        Err(SequenceError::DivergentProfile { from, to: n - 1 })
    }
}

/// Coefficient logs of the chosen generating function.
pub fn egf_coefficients(alpha: &AlphaSequence, which: Egf) -> Vec<f64> {
    match which {
        Egf::Alpha => alpha.log_gamma(),
        Egf::InvAlpha => alpha.log_inv_factorial_alpha(),
    }
}

/// Sums `G_α(r)` or `G_{1/α}(r)` over the available prefix.
pub fn egf_eval(alpha: &AlphaSequence, which: Egf, r: f64) -> Result<SeriesResult, SequenceError> {
    if !(r >= 0.0) {
        return Err(SequenceError::BadParam(format!("r must be nonnegative, got {r}")));
    }
    let coeffs = egf_coefficients(alpha, which);
    if coeffs.is_empty() {
        return Err(SequenceError::TooShort { len: 0, need: 1 });
    }
    if r == 0.0 {
        return Ok(SeriesResult {
            sum: LogValue::from_ln(coeffs[0]),
            terms_used: 1,
            tail_bound: LogValue::ZERO,
            converged: true,
        });
    }
    check_root_decay(&coeffs)?;
    let lr = r.ln();
    Ok(logsumexp_series(|n| LogValue::from_ln(coeffs[n] + n as f64 * lr), DEFAULT_SERIES_TOL, coeffs.len())?)
}

/// A nonnegative real stored as `m · 2^e`, used for Bell-number recurrences
/// whose values leave the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    m: f64,
    e: i64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { m: 0.0, e: 0 };

    pub fn new(x: f64) -> Self {
        Scaled { m: x, e: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        if self.m == 0.0 || !self.m.is_finite() {
            return Scaled { m: self.m, e: 0 };
        }
        let (frac, exp) = libm::frexp(self.m);
        if exp.abs() > 256 {
            Scaled { m: frac, e: self.e + exp as i64 }
        } else {
            self
        }
    }

    /// `e^x` for any finite `x`.
    pub fn exp_of(x: f64) -> Self {
        let k = (x / std::f64::consts::LN_2).floor();
        let rest = x - k * std::f64::consts::LN_2;
        Scaled { m: rest.exp(), e: k as i64 }.normalized()
    }

    pub fn mul(self, o: Scaled) -> Scaled {
        Scaled { m: self.m * o.m, e: self.e + o.e }.normalized()
    }

    pub fn add(self, o: Scaled) -> Scaled {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let shift = small.e - big.e;
        let m = if shift < -2000 { big.m } else { big.m + small.m * 2f64.powi(shift as i32) };
        Scaled { m, e: big.e }.normalized()
    }

    pub fn ln(self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m.ln() + self.e as f64 * std::f64::consts::LN_2
        }
    }

    /// Plain value; infinite when out of range.
    pub fn to_f64(self) -> f64 {
        if self.e > 2000 {
            f64::INFINITY
        } else if self.e < -2000 {
            0.0
        } else {
            // two steps keep the intermediate in range
            let half = self.e / 2;
            self.m * 2f64.powi(half as i32) * 2f64.powi((self.e - half) as i32)
        }
    }
}

/// Bell numbers of order `k`, with `exp_k(r) = exp_k(0) Σ b_k(n) r^n / n!`.
#[derive(Debug, Clone)]
pub struct BellNumbers {
    pub k: u32,
    values: Vec<Scaled>,
    /// Estimated relative rounding error of the largest entry.
    pub rel_error_estimate: f64,
    /// Set when `rel_error_estimate` exceeds `1e-8`.
    pub precision_loss: bool,
}

impl BellNumbers {
    /// `b_k(n)` as `f64` (infinite past the `f64` range).
    pub fn value(&self, n: usize) -> f64 {
        self.values[n].to_f64()
    }

    pub fn log_value(&self, n: usize) -> f64 {
        self.values[n].ln()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The sequence `α(n) = b_k(n)`.
    pub fn alpha(&self) -> AlphaSequence {
        AlphaSequence {
            log_alpha: self.values.iter().map(|v| LogValue::from_ln(v.ln())).collect(),
            provenance: Provenance::Bell(self.k),
            source: None,
        }
    }
}

/// Largest order whose normalizing constant `exp_k(0)` is handled.
pub const MAX_BELL_ORDER: u32 = 5;
/// Largest index served by [`bell_numbers`].
pub const MAX_BELL_INDEX: usize = 200;

/// `b_k(n)` for `n = 0..=N` by iterated exponentiation of formal power series.
///
/// Coefficients are kept in exponential-generating form: if
/// `f = Σ F_j r^j / j!` then `exp(f) = e^{F_0} Σ H_m r^m / m!` with
/// `H_0 = 1` and `H_m = Σ_{j=1..m} C(m-1, j-1) F_j H_{m-j}`.
pub fn bell_numbers(k: u32, n_max: usize) -> Result<BellNumbers, SequenceError> {
    if k < 1 || k > MAX_BELL_ORDER {
        return Err(SequenceError::BadParam(format!("order k must be in 1..={MAX_BELL_ORDER}, got {k}")));
    }
    if n_max > MAX_BELL_INDEX {
        return Err(SequenceError::BadParam(format!("N must be at most {MAX_BELL_INDEX}, got {n_max}")));
    }
    // binomial rows C(m-1, j-1) in f64; exact while below 2^53
    let mut binom: Vec<Vec<f64>> = vec![vec![1.0]];
    for m in 1..n_max.max(1) {
        let prev = &binom[m - 1];
        let mut row = vec![1.0; m + 1];
        for j in 1..m {
            row[j] = prev[j - 1] + prev[j];
        }
        binom.push(row);
    }

    // f(r) = r
    let mut f0 = 0.0f64;
    let mut f: Vec<Scaled> = (0..=n_max).map(|j| if j == 1 { Scaled::new(1.0) } else { Scaled::ZERO }).collect();
    let mut h = vec![Scaled::ZERO; n_max + 1];
    for level in 0..k {
        h[0] = Scaled::new(1.0);
        for m in 1..=n_max {
            let mut acc = Scaled::ZERO;
            for j in 1..=m {
                let c = Scaled::new(binom[m - 1][j - 1]);
                acc = acc.add(c.mul(f[j]).mul(h[m - j]));
            }
            h[m] = acc;
        }
        if level + 1 < k {
            let scale = Scaled::exp_of(f0);
            f[0] = scale;
            for j in 1..=n_max {
                f[j] = scale.mul(h[j]);
            }
            f0 = f0.exp();
        }
    }
    let rel_error_estimate = 4.0 * f64::EPSILON * (k as f64) * (n_max.max(1) as f64);
    Ok(BellNumbers { k, values: h, rel_error_estimate, precision_loss: rel_error_estimate > 1e-8 })
}

/// Shape tested by [`log_shape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    LogConcave,
    LogConvex,
}

/// Second-difference test of a log sequence.
///
/// A FAIL carries the first violating pair `(n, n + 2)`; the margin is the
/// largest signed violation over the sequence.
pub fn log_shape(seq: &[f64], shape: Shape) -> Result<Verdict, SequenceError> {
    log_shape_with(seq, shape, DEFAULT_SLACK)
}

pub fn log_shape_with(seq: &[f64], shape: Shape, slack: f64) -> Result<Verdict, SequenceError> {
    if seq.len() < 3 {
        return Err(SequenceError::TooShort { len: seq.len(), need: 3 });
    }
    let sign = match shape {
        Shape::LogConcave => 1.0,
        Shape::LogConvex => -1.0,
    };
    let mut worst = f64::NEG_INFINITY;
    let mut first_bad = None;
    for n in 0..seq.len() - 2 {
        let d2 = seq[n] + seq[n + 2] - 2.0 * seq[n + 1];
        let v = sign * d2;
        worst = worst.max(v);
        if v > slack * (1.0 + seq[n + 1].abs()) && first_bad.is_none() {
            first_bad = Some(n);
        }
    }
    Ok(match first_bad {
        Some(n) => Verdict::fail((n, n + 2), worst),
        None => Verdict::pass(worst),
    })
}

/// Thresholds for [`sequences_equivalent_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceConfig {
    /// Index window `[from, to]` over which `d(n)/n` must stay within `spread_cap`.
    /// `None` means the last two thirds of the prefix.
    pub window: Option<(usize, usize)>,
    pub spread_cap: f64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig { window: None, spread_cap: 1.0 }
    }
}

/// Constants realizing `K1 c1^n a(n) <= b(n) <= K2 c2^n a(n)` on the prefix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceEquivalence {
    pub k1: f64,
    pub c1: f64,
    pub k2: f64,
    pub c2: f64,
    pub tested_n: usize,
    pub holds: bool,
    /// `max - min` of `d(n)/n` over the window.
    pub spread: f64,
    pub window: (usize, usize),
}

pub fn sequences_equivalent(a: &AlphaSequence, b: &AlphaSequence) -> Result<SequenceEquivalence, SequenceError> {
    sequences_equivalent_with(&a.logs(), &b.logs(), &EquivalenceConfig::default())
}

/// Fits exponent envelopes to `d(n) = log b(n) - log a(n)`.
pub fn sequences_equivalent_with(a: &[f64], b: &[f64], cfg: &EquivalenceConfig) -> Result<SequenceEquivalence, SequenceError> {
    if a.len() != b.len() {
        return Err(SequenceError::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() < 2 {
        return Err(SequenceError::TooShort { len: a.len(), need: 2 });
    }
    let n_max = a.len() - 1;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let slopes: Vec<f64> = (1..=n_max).map(|n| d[n] / n as f64).collect();
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_k1 = (0..=n_max).map(|n| d[n] - n as f64 * lo).fold(f64::INFINITY, f64::min);
    let log_k2 = (0..=n_max).map(|n| d[n] - n as f64 * hi).fold(f64::NEG_INFINITY, f64::max);

    let window = cfg.window.unwrap_or((n_max / 3, n_max));
    let (from, to) = (window.0.max(1), window.1.min(n_max));
    if from > to {
        return Err(SequenceError::TooShort { len: a.len(), need: window.0 + 1 });
    }
    let w = &slopes[from - 1..to];
    let spread = w.iter().copied().fold(f64::NEG_INFINITY, f64::max) - w.iter().copied().fold(f64::INFINITY, f64::min);

    let dominated = (0..=n_max).all(|n| {
        let x = n as f64;
        let tol = DEFAULT_SLACK * (1.0 + d[n].abs());
        log_k1 + x * lo <= d[n] + tol && d[n] <= log_k2 + x * hi + tol
    });
    Ok(SequenceEquivalence {
        k1: log_k1.exp(),
        c1: lo.exp(),
        k2: log_k2.exp(),
        c2: hi.exp(),
        tested_n: n_max,
        holds: dominated && spread.is_finite() && spread < cfg.spread_cap,
        spread,
        window: (from, to),
    })
}
