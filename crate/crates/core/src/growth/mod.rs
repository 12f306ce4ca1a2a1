//! Growth functions: the catalog, user expressions, and sampled class checks.
//!
//! A [`GrowthFunction`] only ever exposes `log u(r)`; positivity holds by
//! construction. Class membership (C_{+,log}, C_{+,1/2}, the convexity
//! classes, and the (U0)-(U3) hypotheses) is checked on finite grids and
//! reported as three-valued [`ClassEvidence`].

mod expr;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use self::expr::{Expr, Func, ParseError};
use crate::numerics::{Mode, ScalarSearch, DEFAULT_SLACK};
use crate::verdict::Status;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownName(String),
    #[error("{name} is not representable at r = {r}")]
    OverflowDomain { name: String, r: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression is not positive at r = {r}")]
    NonPositive { r: f64 },
    #[error("evaluation failed at r = {r}: {reason}")]
    EvalFailure { r: f64, reason: String },
}

/// Something that can evaluate `log u(r)` for `r >= 0`.
pub trait LogEval: Send + Sync {
    fn log_eval(&self, r: f64) -> Result<f64, GrowthError>;
}

impl<F> LogEval for F
where
    F: Fn(f64) -> Result<f64, GrowthError> + Send + Sync,
{
    fn log_eval(&self, r: f64) -> Result<f64, GrowthError> {
        self(r)
    }
}

/// Class tags, both for catalog claims and for [`check_class`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ClassTag {
    CPlusLog,
    CPlusHalf,
    LogExpConvex,
    /// `(log, x^k)`-convexity for the given `k > 0`.
    LogXkConvex(f64),
    Increasing,
    U0,
    U1,
    U2,
    U3,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::CPlusLog => "C_plus_log",
            ClassTag::CPlusHalf => "C_plus_half",
            ClassTag::LogExpConvex => "log_exp_convex",
            ClassTag::LogXkConvex(k) => return f.pad(&format!("log_x{k}_convex")),
            ClassTag::Increasing => "increasing",
            ClassTag::U0 => "U0",
            ClassTag::U1 => "U1",
            ClassTag::U2 => "U2",
            ClassTag::U3 => "U3",
        };
        f.pad(s)
    }
}

#[derive(Clone)]
enum Kind {
    Ks { beta: f64 },
    KsDual { beta: f64 },
    ExpK { k: u32 },
    BellDual { k: u32 },
    ExpScaled { a: f64 },
    Custom { expr: Arc<Expr> },
    Wrapped(Arc<dyn LogEval>),
}

/// A positive continuous function on `[0, ∞)`, known through `log u`.
#[derive(Clone)]
pub struct GrowthFunction {
    name: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
    domain_max: f64,
    claims: Vec<ClassTag>,
    label: Option<String>,
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain_max", &self.domain_max)
            .finish()
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", ps.join(","))?;
        }
        if let Some(l) = &self.label {
            write!(f, "[{l}]")?;
        }
        Ok(())
    }
}

/// Iterated logarithm with the guard `log_1(r) = log(max(r, e))`.
pub fn guarded_log(j: u32, r: f64) -> f64 {
    let mut v = r;
    for _ in 0..j {
        v = v.max(std::f64::consts::E).ln();
    }
    v
}

fn exp_iterated(times: u32, r: f64) -> f64 {
    let mut v = r;
    for _ in 0..times {
        v = v.exp();
    }
    v
}

fn params1(key: &str, v: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([(key.to_string(), v)])
}

impl GrowthFunction {
    /// `u(r) = exp[(1+β) r^{1/(1+β)}]`, `0 <= β < 1`.
    pub fn ks(beta: f64) -> Result<Self, GrowthError> {
        if !(0.0..1.0).contains(&beta) {
            return Err(GrowthError::BadParam(format!("ks needs 0 <= beta < 1, got {beta}")));
        }
        let mut claims = vec![
            ClassTag::CPlusLog,
            ClassTag::CPlusHalf,
            ClassTag::LogExpConvex,
            ClassTag::LogXkConvex(2.0),
            ClassTag::Increasing,
            ClassTag::U0,
            ClassTag::U1,
            ClassTag::U2,
            ClassTag::U3,
        ];
        if beta == 0.0 {
            claims.push(ClassTag::LogXkConvex(1.0));
        }
        Ok(GrowthFunction {
            name: "ks".into(),
            params: params1("beta", beta),
            kind: Kind::Ks { beta },
            domain_max: f64::INFINITY,
            claims,
            label: None,
        })
    }

    /// `u(r) = exp[(1-β) r^{1/(1-β)}]`, the closed-form dual of [`ks`](Self::ks).
    pub fn ks_dual(beta: f64) -> Result<Self, GrowthError> {
        if !(0.0..1.0).contains(&beta) {
            return Err(GrowthError::BadParam(format!("ks_dual needs 0 <= beta < 1, got {beta}")));
        }
        let mut claims = vec![
            ClassTag::CPlusLog,
            ClassTag::CPlusHalf,
            ClassTag::LogExpConvex,
            ClassTag::LogXkConvex(1.0),
            ClassTag::LogXkConvex(2.0),
            ClassTag::Increasing,
            ClassTag::U0,
            ClassTag::U1,
            ClassTag::U3,
        ];
        if beta == 0.0 {
            claims.push(ClassTag::U2);
        }
        Ok(GrowthFunction {
            name: "ks_dual".into(),
            params: params1("beta", beta),
            kind: Kind::KsDual { beta },
            domain_max: f64::INFINITY,
            claims,
            label: None,
        })
    }

    /// The k-fold iterated exponential `exp_k(r)`, so `log u = exp_{k-1}(r)`.
    pub fn exp_k(k: u32) -> Result<Self, GrowthError> {
        if k < 1 {
            return Err(GrowthError::BadParam("exp_k needs k >= 1".into()));
        }
        let mut domain_max = f64::MAX;
        for _ in 0..k - 1 {
            domain_max = domain_max.ln();
        }
        if !(domain_max > 0.0) {
            return Err(GrowthError::OverflowDomain { name: format!("exp_{k}"), r: 0.0 });
        }
        let mut claims = vec![
            ClassTag::CPlusLog,
            ClassTag::CPlusHalf,
            ClassTag::LogExpConvex,
            ClassTag::LogXkConvex(1.0),
            ClassTag::LogXkConvex(2.0),
            ClassTag::Increasing,
            ClassTag::U3,
        ];
        if k == 1 {
            claims.extend([ClassTag::U0, ClassTag::U1, ClassTag::U2]);
        }
        Ok(GrowthFunction {
            name: "exp_k".into(),
            params: params1("k", k as f64),
            kind: Kind::ExpK { k },
            domain_max: if k == 1 { f64::INFINITY } else { domain_max },
            claims,
            label: None,
        })
    }

    /// `v(r) = exp[2 sqrt(r log_{k-1} sqrt(r))]`, `k >= 2`.
    pub fn bell_dual(k: u32) -> Result<Self, GrowthError> {
        if k < 2 {
            return Err(GrowthError::BadParam("bell_dual needs k >= 2".into()));
        }
        Ok(GrowthFunction {
            name: "bell_dual".into(),
            params: params1("k", k as f64),
            kind: Kind::BellDual { k },
            domain_max: f64::INFINITY,
            claims: vec![
                ClassTag::CPlusLog,
                ClassTag::CPlusHalf,
                ClassTag::LogExpConvex,
                ClassTag::LogXkConvex(2.0),
                ClassTag::Increasing,
                ClassTag::U0,
                ClassTag::U1,
                ClassTag::U2,
                ClassTag::U3,
            ],
            label: None,
        })
    }

    /// `u(r) = e^{a r}`, `a > 0`.
    pub fn exp_scaled(a: f64) -> Result<Self, GrowthError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(GrowthError::BadParam(format!("exp_scaled needs a > 0, got {a}")));
        }
        Ok(GrowthFunction {
            name: "exp_scaled".into(),
            params: params1("a", a),
            kind: Kind::ExpScaled { a },
            domain_max: f64::INFINITY,
            claims: vec![
                ClassTag::CPlusLog,
                ClassTag::CPlusHalf,
                ClassTag::LogExpConvex,
                ClassTag::LogXkConvex(1.0),
                ClassTag::LogXkConvex(2.0),
                ClassTag::Increasing,
                ClassTag::U0,
                ClassTag::U1,
                ClassTag::U2,
                ClassTag::U3,
            ],
            label: None,
        })
    }

    /// Wraps an arbitrary `log u` evaluator. Claims are taken on trust.
    pub fn from_log_eval(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        eval: Arc<dyn LogEval>,
        domain_max: f64,
        claims: Vec<ClassTag>,
    ) -> Self {
        GrowthFunction { name: name.into(), params, kind: Kind::Wrapped(eval), domain_max, claims, label: None }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Largest `r` at which `log u(r)` is representable.
    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    /// Classes asserted analytically by the catalog.
    pub fn claims(&self) -> &[ClassTag] {
        &self.claims
    }

    pub fn claims_class(&self, tag: ClassTag) -> bool {
        self.claims.contains(&tag)
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Source text for parsed expressions.
    pub fn expression(&self) -> Option<&str> {
        match self.kind {
            Kind::Custom { .. } => self.label.as_deref(),
            _ => None,
        }
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self.kind, Kind::Custom { .. } | Kind::Wrapped(_))
    }

    /// `log u(r)` for `r >= 0`.
    pub fn log_eval(&self, r: f64) -> Result<f64, GrowthError> {
        if !(r >= 0.0) {
            return Err(GrowthError::EvalFailure { r, reason: "argument must be nonnegative".into() });
        }
        if r > self.domain_max {
            return Err(GrowthError::OverflowDomain { name: self.to_string(), r });
        }
        let v = match &self.kind {
            Kind::Ks { beta } => (1.0 + beta) * r.powf(1.0 / (1.0 + beta)),
            Kind::KsDual { beta } => (1.0 - beta) * r.powf(1.0 / (1.0 - beta)),
            Kind::ExpK { k } => {
                let v = exp_iterated(k - 1, r);
                if !v.is_finite() {
                    return Err(GrowthError::OverflowDomain { name: self.to_string(), r });
                }
                v
            }
            Kind::BellDual { k } => 2.0 * (r * guarded_log(k - 1, r.sqrt())).sqrt(),
            Kind::ExpScaled { a } => a * r,
            Kind::Custom { expr } => expr.ln_value(r).ok_or(GrowthError::NonPositive { r })?,
            Kind::Wrapped(e) => e.log_eval(r)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GrowthError::EvalFailure { r, reason: format!("log u = {v}") })
        }
    }

    /// `u(c r)` as a new growth function.
    pub fn dilate(&self, c: f64) -> GrowthFunction {
        assert!(c > 0.0, "dilation must be positive");
        let inner = self.clone();
        let mut params = self.params.clone();
        params.insert("dilation".into(), c);
        let claims = self
            .claims
            .iter()
            .copied()
            .filter(|t| !matches!(t, ClassTag::U2 | ClassTag::U0 | ClassTag::U1))
            .collect();
        GrowthFunction::from_log_eval(
            format!("{}_dilated", self.name),
            params,
            Arc::new(move |r: f64| inner.log_eval(c * r)),
            self.domain_max / c,
            claims,
        )
    }

    /// Closed-form dual Legendre transform when the catalog knows one.
    pub fn closed_form_dual(&self) -> Option<GrowthFunction> {
        match self.kind {
            Kind::Ks { beta } => GrowthFunction::ks_dual(beta).ok(),
            Kind::KsDual { beta } => GrowthFunction::ks(beta).ok(),
            Kind::ExpScaled { a } => GrowthFunction::exp_scaled(1.0 / a).ok(),
            Kind::ExpK { k: 1 } => GrowthFunction::exp_scaled(1.0).ok(),
            _ => None,
        }
    }

    /// Whether the function is known or sampled to be nondecreasing.
    pub(crate) fn is_increasing(&self) -> bool {
        self.claims_class(ClassTag::Increasing) || self.claims_class(ClassTag::U1)
    }
}

/// Builds a catalog entry by name. Recognised names: `ks`, `ks_dual`,
/// `exp_k` (alias `expk`), `bell_dual`, `exp_scaled`, and `custom` (which
/// needs [`parse_growth`] instead).
pub fn make_catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<GrowthFunction, GrowthError> {
    let get = |key: &str| -> Result<f64, GrowthError> {
        params.get(key).copied().ok_or_else(|| GrowthError::BadParam(format!("{name} needs parameter '{key}'")))
    };
    let get_int = |key: &str| -> Result<u32, GrowthError> {
        let v = get(key)?;
        if v.fract() != 0.0 || v < 0.0 || v > 64.0 {
            return Err(GrowthError::BadParam(format!("{name}: '{key}' must be a small nonnegative integer, got {v}")));
        }
        Ok(v as u32)
    };
    match name {
        "ks" => GrowthFunction::ks(get("beta")?),
        "ks_dual" => GrowthFunction::ks_dual(get("beta")?),
        "exp_k" | "expk" => GrowthFunction::exp_k(get_int("k")?),
        "bell_dual" => GrowthFunction::bell_dual(get_int("k")?),
        "exp_scaled" => GrowthFunction::exp_scaled(get("a")?),
        "custom" => Err(GrowthError::BadParam("custom functions are built with parse_growth".into())),
        other => Err(GrowthError::UnknownName(other.to_string())),
    }
}

/// Names accepted by [`make_catalog`] with their parameters.
pub const CATALOG: &[(&str, &[&str])] = &[
    ("ks", &["beta"]),
    ("ks_dual", &["beta"]),
    ("exp_k", &["k"]),
    ("bell_dual", &["k"]),
    ("exp_scaled", &["a"]),
];

/// Parses a user expression in `r` into a growth function.
///
/// The result is probed at `r ∈ {0, 1, 10}` and rejected if not positive there.
pub fn parse_growth(src: &str) -> Result<GrowthFunction, GrowthError> {
    let expr = expr::parse(src)?;
    for r in [0.0, 1.0, 10.0] {
        match expr.ln_value(r) {
            Some(l) if l.is_finite() => {}
            _ => return Err(GrowthError::NonPositive { r }),
        }
    }
    Ok(GrowthFunction {
        name: "custom".into(),
        params: BTreeMap::new(),
        kind: Kind::Custom { expr: Arc::new(expr) },
        domain_max: f64::INFINITY,
        claims: Vec::new(),
        label: Some(src.trim().to_string()),
    })
}

/// Sample abscissas for class checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub points: Vec<f64>,
}

impl Default for GridSpec {
    /// `r = 2^j`, `j = -20..=40`.
    fn default() -> Self {
        GridSpec { points: (-20..=40).map(|j| 2f64.powi(j)).collect() }
    }
}

impl GridSpec {
    /// `n` geometrically spaced points on `[rmin, rmax]`, `rmin > 0`.
    pub fn geometric(rmin: f64, rmax: f64, n: usize) -> Self {
        assert!(rmin > 0.0 && rmax > rmin && n >= 2, "bad geometric grid");
        let (a, b) = (rmin.ln(), rmax.ln());
        GridSpec { points: (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect() }
    }

    /// Points not exceeding `rmax`.
    pub fn clipped(&self, rmax: f64) -> GridSpec {
        GridSpec { points: self.points.iter().copied().filter(|&r| r <= rmax).collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Result of a sampled class check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEvidence {
    pub class: ClassTag,
    pub verdict: Status,
    /// For convexity classes `(x1, x2, violation)`; for others a class-specific triple.
    pub witness: Option<[f64; 3]>,
    /// Worst violation of the defining inequality (positive means violated).
    pub margin: f64,
    pub grid_points: usize,
    pub note: Option<String>,
}

impl ClassEvidence {
    fn new(class: ClassTag, verdict: Status, margin: f64, grid_points: usize) -> Self {
        ClassEvidence { class, verdict, witness: None, margin, grid_points, note: None }
    }
}

/// Thresholds for the sampled checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCheckConfig {
    pub slack: f64,
    /// Minimal final ratio for the limit classes.
    pub limit_threshold: f64,
    /// Samples examined at the end of the grid for limit trends.
    pub trend_window: usize,
    /// `log u(r)/r` below this cap counts as bounded for (U2).
    pub u2_cap: f64,
}

impl Default for ClassCheckConfig {
    fn default() -> Self {
        ClassCheckConfig { slack: DEFAULT_SLACK, limit_threshold: 50.0, trend_window: 10, u2_cap: 1e6 }
    }
}

fn eval_failure(r: f64, e: GrowthError) -> GrowthError {
    match e {
        e @ GrowthError::EvalFailure { .. } => e,
        other => GrowthError::EvalFailure { r, reason: other.to_string() },
    }
}

/// Checks one class on a grid with default thresholds.
pub fn check_class(u: &GrowthFunction, class: ClassTag, grid: &GridSpec) -> Result<ClassEvidence, GrowthError> {
    check_class_with(u, class, grid, &ClassCheckConfig::default())
}

pub fn check_class_with(
    u: &GrowthFunction,
    class: ClassTag,
    grid: &GridSpec,
    cfg: &ClassCheckConfig,
) -> Result<ClassEvidence, GrowthError> {
    let grid = grid.clipped(u.domain_max());
    match class {
        ClassTag::LogExpConvex => {
            let xs: Vec<f64> = grid.points.iter().filter(|&&r| r > 0.0).map(|r| r.ln()).collect();
            midpoint_convexity(class, &xs, |x| u.log_eval(x.exp()).map_err(|e| eval_failure(x.exp(), e)), cfg)
        }
        ClassTag::LogXkConvex(k) => {
            if !(k > 0.0) {
                return Err(GrowthError::BadParam(format!("convexity exponent must be positive, got {k}")));
            }
            let mut xs: Vec<f64> = std::iter::once(0.0)
                .chain(grid.points.iter().filter(|&&r| r > 0.0).map(|r| r.powf(1.0 / k)))
                .collect();
            xs.dedup();
            midpoint_convexity(class, &xs, |x| u.log_eval(x.powf(k)).map_err(|e| eval_failure(x.powf(k), e)), cfg)
        }
        ClassTag::CPlusLog | ClassTag::CPlusHalf => {
            let mut ratios = Vec::new();
            for &r in grid.points.iter().filter(|&&r| r > 1.0) {
                let l = u.log_eval(r).map_err(|e| eval_failure(r, e))?;
                let denom = if class == ClassTag::CPlusLog { r.ln() } else { r.sqrt() };
                ratios.push((r, l / denom));
            }
            let n = ratios.len();
            let w = cfg.trend_window.min(n);
            let mut ev = ClassEvidence::new(class, Status::Inconclusive, 0.0, n);
            if w < 2 {
                ev.note = Some("too few grid points above r = 1".into());
                return Ok(ev);
            }
            let tail = &ratios[n - w..];
            let increasing = tail.windows(2).all(|p| p[1].1 > p[0].1);
            let last = tail[w - 1];
            ev.margin = cfg.limit_threshold - last.1;
            ev.witness = Some([tail[0].0, last.0, last.1]);
            if increasing && last.1 > cfg.limit_threshold {
                ev.verdict = Status::Pass;
            } else {
                ev.note = Some(format!(
                    "ratio trend {} with final value {:.6e} (threshold {})",
                    if increasing { "increasing" } else { "not increasing" },
                    last.1,
                    cfg.limit_threshold
                ));
            }
            Ok(ev)
        }
        ClassTag::Increasing => check_increasing(u, &grid, cfg),
        ClassTag::U0 | ClassTag::U1 | ClassTag::U2 | ClassTag::U3 => check_u_condition(u, class, &grid, cfg),
    }
}

fn midpoint_convexity<F>(class: ClassTag, xs: &[f64], g: F, cfg: &ClassCheckConfig) -> Result<ClassEvidence, GrowthError>
where
    F: Fn(f64) -> Result<f64, GrowthError>,
{
    let values: Vec<f64> = xs.iter().map(|&x| g(x)).collect::<Result<_, _>>()?;
    let mut ev = ClassEvidence::new(class, Status::Pass, f64::NEG_INFINITY, xs.len());
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let mid = 0.5 * (xs[i] + xs[j]);
            let gm = g(mid)?;
            let chord = 0.5 * (values[i] + values[j]);
            let violation = gm - chord;
            let allowed = cfg.slack * (1.0 + values[i].abs().max(values[j].abs()));
            if violation > ev.margin {
                ev.margin = violation;
            }
            if violation > allowed && ev.verdict == Status::Pass {
                ev.verdict = Status::Fail;
                ev.witness = Some([xs[i], xs[j], violation]);
            }
        }
    }
    if xs.len() < 3 {
        ev.verdict = Status::Inconclusive;
        ev.note = Some("fewer than three grid points in the domain".into());
    }
    Ok(ev)
}

fn check_increasing(u: &GrowthFunction, grid: &GridSpec, cfg: &ClassCheckConfig) -> Result<ClassEvidence, GrowthError> {
    let mut rs: Vec<f64> = std::iter::once(0.0).chain(grid.points.iter().copied().filter(|&r| r > 0.0)).collect();
    rs.sort_by(f64::total_cmp);
    let vals: Vec<f64> = rs.iter().map(|&r| u.log_eval(r).map_err(|e| eval_failure(r, e))).collect::<Result<_, _>>()?;
    let mut ev = ClassEvidence::new(ClassTag::Increasing, Status::Pass, f64::NEG_INFINITY, rs.len());
    for i in 1..rs.len() {
        let drop = vals[i - 1] - vals[i];
        ev.margin = ev.margin.max(drop);
        if drop > cfg.slack * (1.0 + vals[i].abs()) && ev.verdict == Status::Pass {
            ev.verdict = Status::Fail;
            ev.witness = Some([rs[i - 1], rs[i], drop]);
        }
    }
    Ok(ev)
}

fn check_u_condition(
    u: &GrowthFunction,
    class: ClassTag,
    grid: &GridSpec,
    cfg: &ClassCheckConfig,
) -> Result<ClassEvidence, GrowthError> {
    match class {
        ClassTag::U0 => {
            let mut rs: Vec<f64> = grid.points.iter().copied().filter(|&r| r > 0.0).collect();
            rs.sort_by(f64::total_cmp);
            let at0 = u.log_eval(0.0).map_err(|e| eval_failure(0.0, e))?;
            let vals: Vec<f64> = rs.iter().map(|&r| u.log_eval(r).map_err(|e| eval_failure(r, e))).collect::<Result<_, _>>()?;
            let (mut best_r, mut best) = (0.0, at0);
            let mut best_i = None;
            for (i, (&r, &v)) in rs.iter().zip(&vals).enumerate() {
                if v < best {
                    best = v;
                    best_r = r;
                    best_i = Some(i);
                }
            }
            if let Some(i) = best_i {
                if i > 0 && i + 1 < rs.len() {
                    let search = ScalarSearch::default()
                        .with_bounds(rs[i - 1].ln(), rs[i + 1].ln())
                        .with_step(0.25 * (rs[i + 1].ln() - rs[i].ln()));
                    let res = search.run(|x| u.log_eval(x.exp()).unwrap_or(f64::NAN), Mode::Min, rs[i].ln());
                    if let Ok(res) = res {
                        if res.value_opt < best {
                            best = res.value_opt;
                            best_r = res.arg_opt.exp();
                        }
                    }
                }
            }
            let mut ev = ClassEvidence::new(class, Status::Pass, best.abs(), rs.len() + 1);
            ev.witness = Some([best_r, best, 0.0]);
            if best.abs() > cfg.slack {
                ev.verdict = Status::Fail;
                ev.note = Some(format!("inf u = {:.6e}", best.exp()));
            }
            Ok(ev)
        }
        ClassTag::U1 => {
            let at0 = u.log_eval(0.0).map_err(|e| eval_failure(0.0, e))?;
            let inc = check_increasing(u, grid, cfg)?;
            let mut ev = ClassEvidence::new(class, Status::Pass, at0.abs().max(inc.margin), inc.grid_points);
            if at0.abs() > cfg.slack {
                ev.verdict = Status::Fail;
                ev.witness = Some([0.0, at0, 0.0]);
                ev.note = Some(format!("u(0) = {:.6e}", at0.exp()));
            } else if inc.verdict == Status::Fail {
                ev.verdict = Status::Fail;
                ev.witness = inc.witness;
                ev.note = Some("not increasing on the grid".into());
            }
            Ok(ev)
        }
        ClassTag::U2 => {
            let mut samples = Vec::new();
            for j in 0..=40 {
                let r = 2f64.powi(j);
                if r > u.domain_max() {
                    break;
                }
                let l = u.log_eval(r).map_err(|e| eval_failure(r, e))?;
                samples.push((r, l / r));
            }
            let n = samples.len();
            let mut ev = ClassEvidence::new(class, Status::Inconclusive, 0.0, n);
            if n < 2 {
                ev.note = Some("domain too short for a growth trend".into());
                return Ok(ev);
            }
            let w = cfg.trend_window.min(n);
            let tail = &samples[n - w..];
            let (first, last) = (tail[0], tail[w - 1]);
            ev.witness = Some([first.0, last.0, last.1]);
            ev.margin = last.1 - first.1;
            let non_increasing = tail.windows(2).all(|p| p[1].1 <= p[0].1 + cfg.slack * (1.0 + p[0].1.abs()));
            let max_ratio = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
            if first.1 > 0.0 && last.1 > 2.0 * first.1 {
                ev.verdict = Status::Fail;
                ev.note = Some(format!("log u(r)/r grew from {:.6e} to {:.6e}", first.1, last.1));
            } else if non_increasing || max_ratio < cfg.u2_cap {
                ev.verdict = Status::Pass;
            }
            Ok(ev)
        }
        ClassTag::U3 => {
            let mut ev = check_class_with(u, ClassTag::LogXkConvex(2.0), grid, cfg)?;
            ev.class = ClassTag::U3;
            Ok(ev)
        }
        _ => unreachable!("not a U condition"),
    }
}

/// Evidence for (U0), (U1), (U2), (U3) on the default grid.
pub fn check_u_conditions(u: &GrowthFunction) -> Result<Vec<ClassEvidence>, GrowthError> {
    let grid = GridSpec::default();
    [ClassTag::U0, ClassTag::U1, ClassTag::U2, ClassTag::U3]
        .into_iter()
        .map(|c| check_class(u, c, &grid))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        assert_eq!(GrowthFunction::ks(0.0).unwrap().log_eval(2.0).unwrap(), 2.0);
        let e2 = GrowthFunction::exp_k(2).unwrap();
        assert!((e2.log_eval(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        let v = GrowthFunction::bell_dual(2).unwrap();
        let at = v.log_eval(4f64.exp()).unwrap();
        assert!((at - 20.899_406_696_486_72).abs() < 1e-12, "{at}");
        assert_eq!(v.log_eval(0.0).unwrap(), 0.0);
        assert_eq!(GrowthFunction::exp_scaled(3.0).unwrap().log_eval(2.0).unwrap(), 6.0);
    }

    #[test]
    fn catalog_parameter_errors() {
        assert!(matches!(GrowthFunction::ks(1.0), Err(GrowthError::BadParam(_))));
        assert!(matches!(GrowthFunction::ks(-0.1), Err(GrowthError::BadParam(_))));
        assert!(matches!(GrowthFunction::exp_k(0), Err(GrowthError::BadParam(_))));
        assert!(matches!(GrowthFunction::bell_dual(1), Err(GrowthError::BadParam(_))));
        assert!(matches!(GrowthFunction::exp_scaled(0.0), Err(GrowthError::BadParam(_))));
        let p = BTreeMap::from([("k".to_string(), 2.5)]);
        assert!(matches!(make_catalog("exp_k", &p), Err(GrowthError::BadParam(_))));
        assert!(matches!(make_catalog("nope", &p), Err(GrowthError::UnknownName(_))));
    }

    #[test]
    fn exp_k_refuses_overflow() {
        let e2 = GrowthFunction::exp_k(2).unwrap();
        assert!(e2.log_eval(709.0).is_ok());
        assert!(matches!(e2.log_eval(710.0), Err(GrowthError::OverflowDomain { .. })));
        let e3 = GrowthFunction::exp_k(3).unwrap();
        assert!((e3.domain_max() - 709.782_712_893_384f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn guarded_iterated_log() {
        assert_eq!(guarded_log(1, 0.0), 1.0);
        assert_eq!(guarded_log(1, 2f64.exp()), 2.0);
        assert_eq!(guarded_log(2, 100.0), 100f64.ln().ln());
        assert_eq!(guarded_log(2, 1.0), 1.0);
    }

    #[test]
    fn parsed_matches_catalog() {
        let p = parse_growth("exp(1.5*r^(2/3))").unwrap();
        let c = GrowthFunction::ks(0.5).unwrap();
        for r in [0.0, 0.3, 1.0, 10.0, 1e4] {
            let (a, b) = (p.log_eval(r).unwrap(), c.log_eval(r).unwrap());
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_growth("exp(r)+ ("), Err(GrowthError::Parse(ParseError { position: 8, .. }))));
        assert!(matches!(parse_growth("r^2 - 100"), Err(GrowthError::NonPositive { r }) if r == 0.0 || r == 1.0));
    }

    #[test]
    fn convexity_checks() {
        let g = GridSpec::default();
        let lin = GrowthFunction::exp_scaled(1.0).unwrap();
        let ev = check_class(&lin, ClassTag::LogXkConvex(1.0), &g).unwrap();
        assert_eq!(ev.verdict, Status::Pass);
        assert!(ev.margin.abs() < 1e-3);

        let ks = GrowthFunction::ks(0.5).unwrap();
        assert_eq!(check_class(&ks, ClassTag::LogXkConvex(2.0), &g).unwrap().verdict, Status::Pass);
        let ev = check_class(&ks, ClassTag::LogXkConvex(1.0), &g).unwrap();
        assert_eq!(ev.verdict, Status::Fail);
        assert!(ev.witness.unwrap()[2] > 0.0);

        // the hand-computed witness pair x1 = 1, x2 = 9
        let f = |x: f64| ks.log_eval(x).unwrap();
        assert!(f(5.0) > 0.5 * (f(1.0) + f(9.0)) + 0.3);
    }

    #[test]
    fn limit_classes() {
        let g = GridSpec::default();
        let ks = GrowthFunction::ks(0.0).unwrap();
        assert_eq!(check_class(&ks, ClassTag::CPlusLog, &g).unwrap().verdict, Status::Pass);
        assert_eq!(check_class(&ks, ClassTag::CPlusHalf, &g).unwrap().verdict, Status::Pass);
        let poly = parse_growth("1 + r^3").unwrap();
        assert_eq!(check_class(&poly, ClassTag::CPlusLog, &g).unwrap().verdict, Status::Inconclusive);
    }

    #[test]
    fn u_conditions_ks() {
        let ev = check_u_conditions(&GrowthFunction::ks(0.25).unwrap()).unwrap();
        assert!(ev.iter().all(|e| e.verdict == Status::Pass), "{ev:#?}");
    }

    #[test]
    fn u_conditions_exp2() {
        let ev = check_u_conditions(&GrowthFunction::exp_k(2).unwrap()).unwrap();
        assert_eq!(ev[0].verdict, Status::Fail);
        assert!((ev[0].witness.unwrap()[1] - 1.0).abs() < 1e-12);
        assert_eq!(ev[2].verdict, Status::Fail);
    }

    #[test]
    fn u_conditions_bell_dual() {
        let ev = check_u_conditions(&GrowthFunction::bell_dual(2).unwrap()).unwrap();
        assert_eq!(ev[0].verdict, Status::Pass);
        assert_eq!(ev[2].verdict, Status::Pass);
        assert_eq!(ev[3].verdict, Status::Pass, "{:?}", ev[3]);
    }

    #[test]
    fn u0_finds_interior_infimum() {
        let u = parse_growth("exp((r-3)*(r-3))").unwrap();
        let ev = check_class(&u, ClassTag::U0, &GridSpec::default()).unwrap();
        assert_eq!(ev.verdict, Status::Pass, "{ev:?}");
        assert!((ev.witness.unwrap()[0] - 3.0).abs() < 1e-3);
    }
}
