//! Legendre and dual Legendre transforms, the L- and L#-functions, and
//! numerical checks of the identities relating them.
//!
//! All optimizations run in logarithmic abscissas: `x = log r` for
//! `ℓ_u(t) = inf_r u(r)/r^t` and `y = log s` for
//! `u*(r) = sup_s exp(2 sqrt(rs))/u(s)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::growth::{check_class, ClassTag, GridSpec, GrowthError, GrowthFunction};
use crate::numerics::{
    grid_then_polish, ln_factorial, logsumexp_series, LogValue, Mode, NumericsError, OptimResult, ScalarSearch, SeriesResult,
    BRACKET_CAP, DEFAULT_SERIES_TOL, DEFAULT_SLACK,
};
use crate::verdict::Status;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LegendreError {
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("order must be nonnegative, got {0}")]
    NegativeOrder(f64),
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("table needs N >= 2, got {0}")]
    TableTooShort(usize),
    #[error("table construction aborted at n = {n}: {reason}")]
    AbortAt { n: usize, reason: String },
    #[error("coefficient profile shows no decay over n = {from}..{to} (n-th root log goes {first} -> {last})")]
    DivergentProfile { from: usize, to: usize, first: f64, last: f64 },
    #[error("series did not converge at r = {r} within {depth} table terms")]
    TooShallow { r: f64, depth: usize },
}

/// Window used when `u` has no certified unimodality: `x ∈ [-UNCERTIFIED_SPAN, UNCERTIFIED_SPAN]`.
const UNCERTIFIED_SPAN: f64 = 100.0;
const UNCERTIFIED_POINTS: usize = 4001;
/// Largest order `t` explored by [`reconstruct_at`].
pub const RECONSTRUCT_T_CAP: f64 = 1e12;
/// Deepest table built by the adaptive L-function wrappers.
pub const MAX_ADAPTIVE_DEPTH: usize = 16384;
const DEFAULT_START_DEPTH: usize = 32;

fn upper_log_abscissa(u: &GrowthFunction) -> f64 {
    let dm = u.domain_max();
    if dm.is_finite() {
        dm.ln().min(BRACKET_CAP)
    } else {
        BRACKET_CAP
    }
}

fn log_u_at_log(u: &GrowthFunction, x: f64) -> f64 {
    let r = x.exp().min(u.domain_max());
    u.log_eval(r).unwrap_or(f64::NAN)
}

/// Replaces a bare `NonFinite` with the growth error that caused it.
fn explain(u: &GrowthFunction, e: NumericsError) -> LegendreError {
    if let NumericsError::NonFinite { at } = e {
        let r = at.exp().min(u.domain_max());
        if let Err(g) = u.log_eval(r) {
            return LegendreError::Growth(g);
        }
    }
    LegendreError::Numerics(e)
}

/// `(log ℓ_u(t), argmin r)`.
fn legendre_point(u: &GrowthFunction, t: f64, seed_x: Option<f64>, certified: bool) -> Result<(f64, f64), LegendreError> {
    if !(t >= 0.0) {
        return Err(LegendreError::NegativeOrder(t));
    }
    let hi = upper_log_abscissa(u);
    if t == 0.0 {
        let at0 = u.log_eval(0.0)?;
        if u.claims_class(ClassTag::Increasing) || u.claims_class(ClassTag::U1) {
            return Ok((at0, 0.0));
        }
        let res = grid_then_polish(
            |x| log_u_at_log(u, x),
            Mode::Min,
            -UNCERTIFIED_SPAN,
            hi.min(UNCERTIFIED_SPAN),
            UNCERTIFIED_POINTS,
            crate::numerics::DEFAULT_ABSCISSA_TOL,
        )
        .or_else(|e| match e {
            // the infimum sits at r -> 0, which u(0) already covers
            NumericsError::NoBracket { edge, value } if edge <= -UNCERTIFIED_SPAN => {
                Ok(OptimResult { arg_opt: edge, value_opt: value, bracket: (edge, edge), iterations: 0 })
            }
            e => Err(e),
        })
        .map_err(|e| explain(u, e))?;
        return Ok(if res.value_opt < at0 { (res.value_opt, res.arg_opt.exp()) } else { (at0, 0.0) });
    }
    let objective = |x: f64| log_u_at_log(u, x) - t * x;
    let res = if certified {
        let seed = seed_x.unwrap_or_else(|| t.ln()).clamp(-BRACKET_CAP, hi);
        ScalarSearch::default().with_bounds(-BRACKET_CAP, hi).run(objective, Mode::Min, seed)
    } else {
        grid_then_polish(
            objective,
            Mode::Min,
            -UNCERTIFIED_SPAN,
            hi.min(UNCERTIFIED_SPAN),
            UNCERTIFIED_POINTS,
            crate::numerics::DEFAULT_ABSCISSA_TOL,
        )
        .and_then(|r| {
            if r.arg_opt >= hi.min(UNCERTIFIED_SPAN) {
                Err(NumericsError::NoBracket { edge: r.arg_opt, value: r.value_opt })
            } else {
                Ok(r)
            }
        })
    }
    .map_err(|e| explain(u, e))?;
    Ok((res.value_opt, res.arg_opt.exp()))
}

/// `log ℓ_u(t) = min_x (log u(e^x) - t x)`.
///
/// Uses a seeded bracket search when `u` claims (log, exp)-convexity and a
/// grid scan with polish otherwise. At `t = 0` an increasing `u` gives `u(0)`.
pub fn legendre_at(u: &GrowthFunction, t: f64) -> Result<LogValue, LegendreError> {
    let certified = u.claims_class(ClassTag::LogExpConvex);
    legendre_point(u, t, None, certified).map(|(v, _)| LogValue::from_ln(v))
}

/// `{log ℓ_u(n)}` for `n = 0..=N` with the minimizing abscissas.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub source: GrowthFunction,
    pub log_ell: Vec<LogValue>,
    pub argmin: Vec<f64>,
    /// Whether unimodality of the objective was taken from (log, exp)-convexity.
    pub certified_convex: bool,
}

impl LegendreTable {
    pub fn n_max(&self) -> usize {
        self.log_ell.len() - 1
    }

    pub fn log_ell_f64(&self) -> Vec<f64> {
        self.log_ell.iter().map(|v| v.ln()).collect()
    }
}

fn certified_for_table(u: &GrowthFunction) -> bool {
    if u.claims_class(ClassTag::LogExpConvex) {
        return true;
    }
    check_class(u, ClassTag::LogExpConvex, &GridSpec::default())
        .map(|ev| ev.verdict == Status::Pass)
        .unwrap_or(false)
}

/// Builds the table for `n = 0..=N`, warm-starting each search at the previous argmin.
pub fn legendre_table(u: &GrowthFunction, n_max: usize) -> Result<LegendreTable, LegendreError> {
    if n_max < 2 {
        return Err(LegendreError::TableTooShort(n_max));
    }
    let certified = certified_for_table(u);
    let mut log_ell = Vec::with_capacity(n_max + 1);
    let mut argmin = Vec::with_capacity(n_max + 1);
    let mut seed: Option<f64> = None;
    for n in 0..=n_max {
        let (v, r) = legendre_point(u, n as f64, seed, certified)
            .map_err(|e| LegendreError::AbortAt { n, reason: e.to_string() })?;
        if r > 0.0 {
            seed = Some(r.ln());
        }
        log_ell.push(LogValue::from_ln(v));
        argmin.push(r);
    }
    Ok(LegendreTable { source: u.clone(), log_ell, argmin, certified_convex: certified })
}

/// `log u*(r) = max( -log u(0), sup_y (2 sqrt(r) e^{y/2} - log u(e^y)) )`.
pub fn dual_legendre_at(u: &GrowthFunction, r: f64) -> Result<LogValue, LegendreError> {
    if !(r >= 0.0) {
        return Err(LegendreError::NegativeArgument(r));
    }
    if r == 0.0 {
        return Ok(legendre_at(u, 0.0)?.recip());
    }
    let at0 = -u.log_eval(0.0)?;
    let hi = upper_log_abscissa(u);
    let sr = r.sqrt();
    let objective = |y: f64| 2.0 * sr * (0.5 * y).exp() - log_u_at_log(u, y);
    let certified = u.claims_class(ClassTag::LogXkConvex(2.0)) || u.claims_class(ClassTag::U3);
    let res = if certified {
        ScalarSearch::default().with_bounds(-BRACKET_CAP, hi).run(objective, Mode::Max, r.ln().clamp(-BRACKET_CAP, hi))
    } else {
        grid_then_polish(
            objective,
            Mode::Max,
            -UNCERTIFIED_SPAN,
            hi.min(UNCERTIFIED_SPAN),
            UNCERTIFIED_POINTS,
            crate::numerics::DEFAULT_ABSCISSA_TOL,
        )
    };
    let best = match res {
        Ok(res) => res.value_opt,
        // supremum approached as s -> 0+, which is the boundary value
        Err(NumericsError::NoBracket { edge, .. }) if edge <= -BRACKET_CAP => at0,
        Err(e) => return Err(explain(u, e)),
    };
    Ok(LogValue::from_ln(best.max(at0)))
}

/// `u*` evaluated numerically through [`dual_legendre_at`].
pub fn numeric_dual(u: &GrowthFunction) -> GrowthFunction {
    let inner = u.clone();
    let mut claims = vec![
        ClassTag::CPlusLog,
        ClassTag::CPlusHalf,
        ClassTag::LogExpConvex,
        ClassTag::LogXkConvex(2.0),
        ClassTag::Increasing,
        ClassTag::U3,
    ];
    if u.claims_class(ClassTag::U0) {
        claims.extend([ClassTag::U0, ClassTag::U1]);
    }
    GrowthFunction::from_log_eval(
        format!("dual[{u}]"),
        BTreeMap::new(),
        Arc::new(move |r: f64| {
            dual_legendre_at(&inner, r)
                .map(|v| v.ln())
                .map_err(|e| GrowthError::EvalFailure { r, reason: e.to_string() })
        }),
        f64::INFINITY,
        claims,
    )
}

/// `u*`, from the catalog's closed form when one exists, numerically otherwise.
pub fn dual_growth(u: &GrowthFunction) -> GrowthFunction {
    u.closed_form_dual().unwrap_or_else(|| numeric_dual(u))
}

fn check_decay(profile: &[f64], offset: usize) -> Result<(), LegendreError> {
    let n = profile.len();
    if n < 3 {
        return Ok(());
    }
    let from = n - n / 3 - 1;
    let (first, last) = (profile[from], profile[n - 1]);
    if last < first {
        Ok(())
    } else {
        Err(LegendreError::DivergentProfile { from: from + offset, to: n - 1 + offset, first, last })
    }
}

fn sum_table_series<F>(depth: usize, term: F) -> Result<SeriesResult, LegendreError>
where
    F: FnMut(usize) -> LogValue,
{
    Ok(logsumexp_series(term, DEFAULT_SERIES_TOL, depth)?)
}

/// `L_u(r) = Σ ℓ_u(n) r^n` over the table.
pub fn l_function_at(table: &LegendreTable, r: f64) -> Result<SeriesResult, LegendreError> {
    if !(r >= 0.0) {
        return Err(LegendreError::NegativeArgument(r));
    }
    if r == 0.0 {
        return Ok(SeriesResult { sum: table.log_ell[0], terms_used: 1, tail_bound: LogValue::ZERO, converged: true });
    }
    let profile: Vec<f64> = (1..table.log_ell.len()).map(|n| table.log_ell[n].ln() / n as f64).collect();
    check_decay(&profile, 1)?;
    let lr = r.ln();
    sum_table_series(table.log_ell.len(), |n| LogValue::from_ln(table.log_ell[n].ln() + n as f64 * lr))
}

/// `L#_u(r) = Σ r^n / (ℓ_u(n) (n!)^2)` over the table.
pub fn l_sharp_at(table: &LegendreTable, r: f64) -> Result<SeriesResult, LegendreError> {
    if !(r >= 0.0) {
        return Err(LegendreError::NegativeArgument(r));
    }
    if r == 0.0 {
        return Ok(SeriesResult {
            sum: table.log_ell[0].recip(),
            terms_used: 1,
            tail_bound: LogValue::ZERO,
            converged: true,
        });
    }
    let profile: Vec<f64> = (1..table.log_ell.len())
        .map(|n| -(table.log_ell[n].ln() + 2.0 * ln_factorial(n)) / n as f64)
        .collect();
    check_decay(&profile, 1)?;
    let lr = r.ln();
    sum_table_series(table.log_ell.len(), |n| {
        LogValue::from_ln(n as f64 * lr - table.log_ell[n].ln() - 2.0 * ln_factorial(n))
    })
}

/// `log sup_t ℓ_u(t) r^t`, with `ℓ_u` evaluated on demand at non-integer `t`.
pub fn reconstruct_at(table: &LegendreTable, r: f64) -> Result<LogValue, LegendreError> {
    if !(r >= 0.0) {
        return Err(LegendreError::NegativeArgument(r));
    }
    if r == 0.0 {
        return Ok(table.log_ell[0]);
    }
    let lr = r.ln();
    let u = &table.source;
    let (best_n, _) = table
        .log_ell
        .iter()
        .enumerate()
        .map(|(n, v)| (n, v.ln() + n as f64 * lr))
        .fold((0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let seed = best_n as f64;
    let step = (0.5 * seed).max(0.5);
    let failure = std::cell::RefCell::new(None);
    let objective = |t: f64| {
        let n = (t.round() as usize).min(table.argmin.len() - 1);
        let seed_x = (table.argmin[n] > 0.0).then(|| table.argmin[n].ln());
        match legendre_point(u, t, seed_x, table.certified_convex) {
            Ok((v, _)) => v + t * lr,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let res = ScalarSearch::default().with_bounds(0.0, RECONSTRUCT_T_CAP).with_step(step).run(objective, Mode::Max, seed);
    match res {
        Ok(res) => Ok(LogValue::from_ln(res.value_opt)),
        Err(NumericsError::NoBracket { edge, value }) if edge == 0.0 => Ok(LogValue::from_ln(value)),
        Err(e) => Err(failure.into_inner().unwrap_or(LegendreError::Numerics(e))),
    }
}

fn adaptive_table<F>(u: &GrowthFunction, r_max: f64, start: usize, mut eval: F) -> Result<LegendreTable, LegendreError>
where
    F: FnMut(&LegendreTable, f64) -> Result<SeriesResult, LegendreError>,
{
    let mut n = start.clamp(2, MAX_ADAPTIVE_DEPTH);
    loop {
        let table = legendre_table(u, n)?;
        match eval(&table, r_max) {
            Ok(s) if s.converged => return Ok(table),
            Ok(_) | Err(LegendreError::Numerics(NumericsError::NonDecreasingTail { .. })) if n < MAX_ADAPTIVE_DEPTH => {
                n *= 2;
            }
            Ok(_) => return Err(LegendreError::TooShallow { r: r_max, depth: n + 1 }),
            Err(e) => return Err(e),
        }
    }
}

fn series_growth(
    name: String,
    table: LegendreTable,
    r_max: f64,
    eval: fn(&LegendreTable, f64) -> Result<SeriesResult, LegendreError>,
) -> GrowthFunction {
    let table = Arc::new(table);
    GrowthFunction::from_log_eval(
        name,
        BTreeMap::new(),
        Arc::new(move |r: f64| match eval(&table, r) {
            Ok(s) if s.converged => Ok(s.sum.ln()),
            Ok(_) => Err(GrowthError::EvalFailure { r, reason: "series not converged within table depth".into() }),
            Err(e) => Err(GrowthError::EvalFailure { r, reason: e.to_string() }),
        }),
        r_max,
        vec![ClassTag::LogExpConvex, ClassTag::Increasing],
    )
}

/// `L_u` as a growth function on `[0, r_max]`, with the table deepened until
/// the series converges at `r_max`.
pub fn l_function_growth(u: &GrowthFunction, r_max: f64) -> Result<GrowthFunction, LegendreError> {
    l_function_growth_from(u, r_max, DEFAULT_START_DEPTH)
}

/// As [`l_function_growth`], starting the depth search at `start`.
pub fn l_function_growth_from(u: &GrowthFunction, r_max: f64, start: usize) -> Result<GrowthFunction, LegendreError> {
    let table = adaptive_table(u, r_max, start, l_function_at)?;
    Ok(series_growth(format!("L[{u}]"), table, r_max, l_function_at))
}

/// `L#_u` as a growth function on `[0, r_max]`.
pub fn l_sharp_growth(u: &GrowthFunction, r_max: f64) -> Result<GrowthFunction, LegendreError> {
    l_sharp_growth_from(u, r_max, DEFAULT_START_DEPTH)
}

/// As [`l_sharp_growth`], starting the depth search at `start`.
pub fn l_sharp_growth_from(u: &GrowthFunction, r_max: f64, start: usize) -> Result<GrowthFunction, LegendreError> {
    let table = adaptive_table(u, r_max, start, l_sharp_at)?;
    Ok(series_growth(format!("Lsharp[{u}]"), table, r_max, l_sharp_at))
}

/// One line of an identity or bound report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub status: Status,
    /// Worst log-scale violation; positive means violated.
    pub worst_margin: f64,
    pub witness: Option<(usize, usize)>,
    /// Estimated constant, where the check produces one.
    pub constant: Option<f64>,
    pub note: Option<String>,
}

impl IdentityCheck {
    fn skipped(name: &str, why: impl Into<String>) -> Self {
        IdentityCheck {
            name: name.into(),
            status: Status::Skipped,
            worst_margin: 0.0,
            witness: None,
            constant: None,
            note: Some(why.into()),
        }
    }

    fn from_worst(name: &str, w: &Worst) -> Self {
        IdentityCheck {
            name: name.into(),
            status: if w.violated.is_some() { Status::Fail } else { Status::Pass },
            worst_margin: w.margin,
            witness: w.violated,
            constant: None,
            note: None,
        }
    }
}

/// Largest violation seen and the first index pair exceeding its allowance.
struct Worst {
    margin: f64,
    violated: Option<(usize, usize)>,
}

impl Worst {
    fn new() -> Self {
        Worst { margin: f64::NEG_INFINITY, violated: None }
    }

    fn see(&mut self, raw: f64, allowed: f64, at: (usize, usize)) {
        self.margin = self.margin.max(raw);
        if raw > allowed && self.violated.is_none() {
            self.violated = Some(at);
        }
    }
}

fn n_log_n(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let x = n as f64;
        x * x.ln()
    }
}

/// Numerical checks of the log-concavity, submultiplicativity, `x^k` log-convexity,
/// the `2^{k(n+m)}` bound, and the `ℓ_{u*}` identity on `n <= N`.
pub fn verify_legendre_identities(u: &GrowthFunction, n_max: usize, k: f64) -> Result<Vec<IdentityCheck>, LegendreError> {
    let table = legendre_table(u, n_max.max(4))?;
    Ok(identities_from_table(&table, k, true))
}

pub(crate) fn identities_from_table(table: &LegendreTable, k: f64, with_dual: bool) -> Vec<IdentityCheck> {
    let u = &table.source;
    let l = table.log_ell_f64();
    let n_max = l.len() - 1;
    let slack = DEFAULT_SLACK;
    let scaled = |v: f64| slack * (1.0 + v.abs());
    let mut out = Vec::new();

    let mut w = Worst::new();
    for n in 0..n_max - 1 {
        w.see(l[n] + l[n + 2] - 2.0 * l[n + 1], scaled(l[n + 1]), (n, n + 2));
    }
    out.push(IdentityCheck::from_worst("log_concave", &w));

    let mut w = Worst::new();
    for n in 0..=n_max {
        for m in 0..=n_max - n {
            w.see(l[0] + l[n + m] - l[n] - l[m], scaled(l[n] + l[m]), (n, m));
        }
    }
    out.push(IdentityCheck::from_worst("submultiplicative", &w));

    let xk = check_class(u, ClassTag::LogXkConvex(k), &GridSpec::default());
    let xk_ok = u.claims_class(ClassTag::LogXkConvex(k)) || matches!(&xk, Ok(ev) if ev.verdict == Status::Pass);
    if xk_ok {
        let g: Vec<f64> = (0..=n_max).map(|n| l[n] + k * n_log_n(n)).collect();
        let mut w = Worst::new();
        for n in 0..n_max - 1 {
            w.see(2.0 * g[n + 1] - g[n] - g[n + 2], scaled(g[n + 1]), (n, n + 2));
        }
        out.push(IdentityCheck::from_worst("xk_log_convex", &w));

        let mut w = Worst::new();
        let ln2 = std::f64::consts::LN_2;
        for n in 0..=n_max {
            for m in 0..=n_max - n {
                let rhs = l[0] + k * (n + m) as f64 * ln2 + l[n + m];
                w.see(l[n] + l[m] - rhs, scaled(rhs), (n, m));
            }
        }
        out.push(IdentityCheck::from_worst("power_of_two_bound", &w));
    } else {
        let why = format!("u is not (log, x^{k})-convex on the sampled grid");
        out.push(IdentityCheck::skipped("xk_log_convex", why.clone()));
        out.push(IdentityCheck::skipped("power_of_two_bound", why));
    }

    if !with_dual {
        return out;
    }
    let x2_ok = u.claims_class(ClassTag::LogXkConvex(2.0))
        || matches!(check_class(u, ClassTag::LogXkConvex(2.0), &GridSpec::default()), Ok(ev) if ev.verdict == Status::Pass);
    let half_ok = u.claims_class(ClassTag::CPlusHalf)
        || matches!(check_class(u, ClassTag::CPlusHalf, &GridSpec::default()), Ok(ev) if ev.verdict == Status::Pass);
    if x2_ok && half_ok {
        let dual = numeric_dual(u);
        let mut w = Worst::new();
        let mut failure = None;
        for n in 1..=n_max {
            match legendre_at(&dual, n as f64) {
                Ok(v) => {
                    let x = n as f64;
                    let rhs = 2.0 * x - l[n] - 2.0 * x * x.ln();
                    w.see((v.ln() - rhs).abs(), IDENTITY_TOL, (n, n));
                }
                Err(e) => {
                    failure = Some((n, e));
                    break;
                }
            }
        }
        let mut check = IdentityCheck::from_worst("dual_transform_identity", &w);
        if let Some((n, e)) = failure {
            check.status = Status::Inconclusive;
            check.note = Some(format!("dual transform failed at n = {n}: {e}"));
        }
        out.push(check);
    } else {
        out.push(IdentityCheck::skipped(
            "dual_transform_identity",
            "u lacks (log, x^2)-convexity or C_plus_half evidence",
        ));
    }
    out
}

/// Absolute log-scale tolerance for the `ℓ_{u*}` identity.
pub const IDENTITY_TOL: f64 = 1e-6;

/// Checks `L_u(r) <= (e a / log a) u(a r)` on the grid and estimates
/// `C = sup u(r) / L_u(2^k r)`.
pub fn verify_lfunction_bounds(u: &GrowthFunction, a: f64, k: f64, grid: &GridSpec) -> Result<Vec<IdentityCheck>, LegendreError> {
    if !(a > 1.0) {
        return Err(LegendreError::Growth(GrowthError::BadParam(format!("a must exceed 1, got {a}"))));
    }
    let mut out = Vec::new();
    let rs: Vec<f64> = grid.points.iter().copied().filter(|&r| r >= 0.0).collect();
    let r_top = rs.iter().copied().fold(0.0, f64::max);
    let exp_convex = u.claims_class(ClassTag::LogExpConvex)
        || matches!(check_class(u, ClassTag::LogExpConvex, &GridSpec::default()), Ok(ev) if ev.verdict == Status::Pass);

    let need = r_top * a.max(2f64.powf(k));
    let table = adaptive_table(u, need, DEFAULT_START_DEPTH, l_function_at)?;

    if exp_convex {
        let log_const = (std::f64::consts::E * a / a.ln()).ln();
        let mut w = Worst::new();
        for (i, &r) in rs.iter().enumerate() {
            let lhs = l_function_at(&table, r)?.sum.ln();
            let rhs = log_const + u.log_eval(a * r)?;
            w.see(lhs - rhs, DEFAULT_SLACK, (i, i));
        }
        let mut c = IdentityCheck::from_worst("l_function_upper_bound", &w);
        c.constant = Some(log_const.exp());
        out.push(c);
    } else {
        out.push(IdentityCheck::skipped("l_function_upper_bound", "u is not (log, exp)-convex on the sampled grid"));
    }

    let xk_ok = u.claims_class(ClassTag::LogXkConvex(k))
        || matches!(check_class(u, ClassTag::LogXkConvex(k), &GridSpec::default()), Ok(ev) if ev.verdict == Status::Pass);
    if xk_ok && u.is_increasing() {
        let scale = 2f64.powf(k);
        let mut ratios = Vec::with_capacity(rs.len());
        for &r in &rs {
            ratios.push(u.log_eval(r)? - l_function_at(&table, scale * r)?.sum.ln());
        }
        let (imax, &worst) = ratios
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is nonempty");
        let tail = &ratios[ratios.len().saturating_sub(10)..];
        let rising = tail.len() >= 2 && tail.windows(2).all(|p| p[1] > p[0] + DEFAULT_SLACK);
        let mut c = IdentityCheck {
            name: "l_function_lower_bound".into(),
            status: if rising { Status::Inconclusive } else { Status::Pass },
            worst_margin: worst,
            witness: None,
            constant: Some(worst.exp()),
            note: None,
        };
        if rising {
            c.note = Some(format!("u(r)/L(2^k r) still rising at the grid edge (max at index {imax})"));
        }
        out.push(c);
    } else {
        out.push(IdentityCheck::skipped(
            "l_function_lower_bound",
            format!("u is not increasing and (log, x^{k})-convex on the sampled grid"),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn ks(beta: f64) -> GrowthFunction {
        GrowthFunction::ks(beta).unwrap()
    }

    #[test]
    fn legendre_closed_forms() {
        assert!((legendre_at(&ks(0.0), 1.0).unwrap().ln() - 1.0).abs() < 1e-12);
        assert!((legendre_at(&ks(0.0), 2.0).unwrap().to_real() - 1.847_264_024_732_662).abs() < 1e-9);
        assert_eq!(legendre_at(&ks(0.3), 0.0).unwrap().ln(), 0.0);
        let v = legendre_at(&ks(0.5), 3.0).unwrap().to_real();
        assert!((v - 0.641_622_407_259_680_9).abs() < 1e-9, "{v}");
        let v = legendre_at(&GrowthFunction::exp_scaled(2.0).unwrap(), 3.0).unwrap().to_real();
        assert!((v - 5.951_270_199_463_013).abs() < 1e-8, "{v}");
    }

    #[test]
    fn table_ks0() {
        let t = legendre_table(&ks(0.0), 4).unwrap();
        let want = [1.0, E, 1.847_264_024_732_662, 0.743_908_774_932_876_4, 0.213_274_023_566_969_6];
        for (v, w) in t.log_ell.iter().zip(want) {
            assert!((v.to_real() - w).abs() < 1e-9, "{} vs {w}", v.to_real());
        }
        assert!(t.certified_convex);
        assert!(t.argmin.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn table_rejects_short() {
        assert!(matches!(legendre_table(&ks(0.0), 1), Err(LegendreError::TableTooShort(1))));
    }

    #[test]
    fn dual_values() {
        assert!((dual_legendre_at(&ks(0.0), 1.0).unwrap().ln() - 1.0).abs() < 1e-10);
        assert!((dual_legendre_at(&ks(0.5), 2.0).unwrap().ln() - 2.0).abs() < 1e-9);
        assert_eq!(dual_legendre_at(&ks(0.25), 0.0).unwrap().ln(), 0.0);
    }

    #[test]
    fn series_values() {
        let t = legendre_table(&ks(0.0), 80).unwrap();
        assert_eq!(l_function_at(&t, 0.0).unwrap().sum.to_real(), 1.0);
        let s = l_function_at(&t, 0.5).unwrap();
        assert!(s.converged);
        assert!((s.sum.to_real() - 2.928_905_523_153_274).abs() < 1e-10);
        let s = l_sharp_at(&t, 1.0).unwrap();
        assert!((s.sum.to_real() - 1.550_414_052_231_529_4).abs() < 1e-10);
    }

    #[test]
    fn divergent_profile_detected() {
        let mut t = legendre_table(&ks(0.0), 30).unwrap();
        for (n, v) in t.log_ell.iter_mut().enumerate() {
            *v = LogValue::from_ln(n as f64 * 0.1);
        }
        assert!(matches!(l_function_at(&t, 0.5), Err(LegendreError::DivergentProfile { .. })));
    }

    #[test]
    fn reconstruction() {
        let t = legendre_table(&ks(0.0), 10).unwrap();
        assert!((reconstruct_at(&t, 1.0).unwrap().ln() - 1.0).abs() < 1e-8);
        assert_eq!(reconstruct_at(&t, 0.0).unwrap().ln(), 0.0);
        let u = ks(0.5);
        let t = legendre_table(&u, 10).unwrap();
        for r in [0.1, 1.0, 10.0] {
            let got = reconstruct_at(&t, r).unwrap().ln();
            assert!((got - u.log_eval(r).unwrap()).abs() < 1e-6, "r = {r}: {got}");
        }
    }

    #[test]
    fn identities_ks0() {
        let checks = verify_legendre_identities(&ks(0.0), 20, 2.0).unwrap();
        assert_eq!(checks.len(), 5);
        for c in &checks {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
        assert!(checks[4].worst_margin < 1e-6);
    }

    #[test]
    fn identities_skip_without_hypotheses() {
        let u = crate::growth::parse_growth("exp(r^0.4) + r").unwrap();
        let checks = verify_legendre_identities(&u, 8, 1.0).unwrap();
        assert_eq!(checks[2].status, Status::Skipped);
    }

    #[test]
    fn lfunction_bounds_ks() {
        let grid = GridSpec::geometric(1e-2, 30.0, 25);
        let checks = verify_lfunction_bounds(&ks(0.0), E, 2.0, &grid).unwrap();
        assert_eq!(checks[0].status, Status::Pass, "{checks:?}");
        assert!((checks[0].constant.unwrap() - E * E).abs() < 1e-12);
        assert_eq!(checks[1].status, Status::Pass, "{checks:?}");
        assert!(checks[1].constant.unwrap().is_finite());
    }

    #[test]
    fn numeric_dual_wrapper() {
        let d = numeric_dual(&ks(0.5));
        assert!((d.log_eval(2.0).unwrap() - 2.0).abs() < 1e-9);
        assert!(dual_growth(&ks(0.5)).is_catalog());
    }
}
