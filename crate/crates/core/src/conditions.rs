//! The condition engine: (A1) through (C3) plus near-(B2) on a finite prefix
//! of `α`, with witnesses and tight constant estimates.
//!
//! Asymptotic conditions are judged on a trailing window (the last third of
//! the table by default). PASS there means the trend is decisive on that
//! window, never that the condition is proved.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::growth::{check_class, check_u_conditions, ClassEvidence, ClassTag, GridSpec, GrowthError, GrowthFunction};
use crate::legendre::{legendre_at, LegendreError};
use crate::numerics::{ln_factorial, log_add_exp, NumericsError, BRACKET_CAP, DEFAULT_SLACK};
use crate::sequences::{
    alpha_from_growth, log_shape, sequences_equivalent_with, AlphaSequence, EquivalenceConfig, SequenceError, Shape,
};
use crate::verdict::{Status, Verdict};

#[derive(Debug, Error)]
pub enum ConditionError {
    #[error("condition checks need N >= {need}, got {got}")]
    TooShort { got: usize, need: usize },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Legendre(#[from] LegendreError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

/// Minimal table depth for [`check_condition`].
pub const MIN_CONDITION_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConditionId {
    A1,
    A2,
    A2Tilde,
    B1,
    B1Tilde,
    B2,
    NearB2,
    B2Tilde,
    B3,
    C1,
    C2,
    C3,
}

impl ConditionId {
    pub const ALL: [ConditionId; 12] = [
        ConditionId::A1,
        ConditionId::A2,
        ConditionId::A2Tilde,
        ConditionId::B1,
        ConditionId::B1Tilde,
        ConditionId::B2,
        ConditionId::NearB2,
        ConditionId::B2Tilde,
        ConditionId::B3,
        ConditionId::C1,
        ConditionId::C2,
        ConditionId::C3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::A1 => "A1",
            ConditionId::A2 => "A2",
            ConditionId::A2Tilde => "A2_tilde",
            ConditionId::B1 => "B1",
            ConditionId::B1Tilde => "B1_tilde",
            ConditionId::B2 => "B2",
            ConditionId::NearB2 => "near_B2",
            ConditionId::B2Tilde => "B2_tilde",
            ConditionId::B3 => "B3",
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
        }
    }

    pub fn parse(s: &str) -> Option<ConditionId> {
        ConditionId::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Implications that must never show premise PASS with conclusion FAIL.
pub const IMPLICATIONS: [(ConditionId, ConditionId); 6] = [
    (ConditionId::A1, ConditionId::A2Tilde),
    (ConditionId::B3, ConditionId::B2Tilde),
    (ConditionId::B2Tilde, ConditionId::B1Tilde),
    (ConditionId::B2, ConditionId::B1),
    (ConditionId::NearB2, ConditionId::B1),
    (ConditionId::C3, ConditionId::C1),
];

/// Tunable thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionConfig {
    /// Fraction of the table forming the trailing window.
    pub window_fraction: f64,
    pub slack: f64,
    /// Allowed rise of the (B1) root sequence from the early to the late half.
    pub b1_rise_tol: f64,
    /// (B1) FAIL needs the root sequence to exceed this.
    pub b1_fail_floor: f64,
    /// Spread cap for the near-(B2) majorant route.
    pub near_b2_spread_cap: f64,
    /// Candidate constants for assert mode; an estimate above its candidate is a FAIL.
    pub candidates: BTreeMap<ConditionId, f64>,
    /// Worker threads for [`full_report`]; `None` reads `CKS_TOOLKIT_THREADS`.
    pub threads: Option<usize>,
}

impl Default for ConditionConfig {
    fn default() -> Self {
        ConditionConfig {
            window_fraction: 1.0 / 3.0,
            slack: DEFAULT_SLACK,
            b1_rise_tol: 0.25,
            b1_fail_floor: 10.0,
            near_b2_spread_cap: 1.0,
            candidates: BTreeMap::new(),
            threads: None,
        }
    }
}

impl ConditionConfig {
    fn window_start(&self, n_max: usize) -> usize {
        let w = ((n_max as f64) * self.window_fraction).floor() as usize;
        n_max.saturating_sub(w.max(2)).max(1)
    }
}

/// Checks one condition with default thresholds.
pub fn check_condition(id: ConditionId, alpha: &AlphaSequence) -> Result<Verdict, ConditionError> {
    check_condition_with(id, alpha, &ConditionConfig::default())
}

pub fn check_condition_with(id: ConditionId, alpha: &AlphaSequence, cfg: &ConditionConfig) -> Result<Verdict, ConditionError> {
    let n_max = alpha.n_max();
    if alpha.len() < MIN_CONDITION_N + 1 {
        return Err(ConditionError::TooShort { got: n_max, need: MIN_CONDITION_N });
    }
    let la = alpha.logs();
    let verdict = match id {
        ConditionId::A1 => check_a1(&la, cfg),
        ConditionId::A2 => root_trend(&alpha.log_gamma(), cfg),
        ConditionId::A2Tilde => root_trend(&alpha.log_inv_factorial_alpha(), cfg),
        ConditionId::B1 => check_b1(&alpha.log_gamma(), cfg),
        ConditionId::B1Tilde => check_b1(&alpha.log_inv_factorial_alpha(), cfg),
        ConditionId::B2 => log_shape(&alpha.log_gamma(), Shape::LogConcave)?,
        ConditionId::B2Tilde => log_shape(&alpha.log_inv_factorial_alpha(), Shape::LogConcave)?,
        ConditionId::B3 => log_shape(&la, Shape::LogConvex)?,
        ConditionId::NearB2 => check_near_b2(alpha, cfg)?,
        ConditionId::C1 => constant_c1(&la),
        ConditionId::C2 => constant_pairs(&la, |n, m| la[n + m] - la[n] - la[m]),
        ConditionId::C3 => constant_pairs(&la, |n, m| la[n] + la[m] - la[n + m]),
    };
    Ok(apply_candidate(id, verdict, cfg))
}

fn apply_candidate(id: ConditionId, v: Verdict, cfg: &ConditionConfig) -> Verdict {
    match (cfg.candidates.get(&id), v.constant) {
        (Some(&cand), Some(est)) if v.status == Status::Pass && est > cand * (1.0 + cfg.slack) => {
            let witness = v.witness.unwrap_or((0, 0));
            let mut f = Verdict::fail(witness, est.ln() - cand.ln()).with_constant(est);
            f.note = Some(format!("estimated constant {est:.15e} exceeds candidate {cand}"));
            f
        }
        _ => v,
    }
}

fn check_a1(la: &[f64], cfg: &ConditionConfig) -> Verdict {
    if la[0].abs() > cfg.slack {
        let mut v = Verdict::fail((0, 0), la[0].abs());
        v.note = Some(format!("alpha(0) = {:.15e}", la[0].exp()));
        return v;
    }
    let n_max = la.len() - 1;
    let w0 = cfg.window_start(n_max);
    let q = |n: usize| -la[n] / n as f64;
    let m = (w0..=n_max).map(q).fold(f64::NEG_INFINITY, f64::max);
    let log_sigma = m.max(0.0);
    let sigma = log_sigma.exp();
    let floor = (w0..=n_max).map(|n| la[n] + n as f64 * log_sigma).fold(f64::INFINITY, f64::min);
    if m > 0.0 && q(n_max) >= m && q(n_max) > q(n_max - 1) {
        return Verdict::inconclusive(-floor, "sigma estimate still rising at the end of the table").with_constant(sigma);
    }
    Verdict::pass(-floor).with_constant(sigma)
}

/// Trend of `s(n)/n` over the trailing window.
fn root_trend(s: &[f64], cfg: &ConditionConfig) -> Verdict {
    let n_max = s.len() - 1;
    let w0 = cfg.window_start(n_max);
    let root: Vec<f64> = (w0..=n_max).map(|n| s[n] / n as f64).collect();
    let last = *root.last().expect("window nonempty");
    let steps = root.windows(2);
    let tol = |x: f64| cfg.slack * (1.0 + x.abs());
    let decreasing = steps.clone().all(|p| p[1] <= p[0] + tol(p[0]));
    let increasing = steps.clone().all(|p| p[1] >= p[0] - tol(p[0]));
    if decreasing && last < 0.0 && last < root[0] {
        Verdict::pass(last).with_constant(last.exp())
    } else if increasing && last > 0.0 && last > root[0] {
        let mut v = Verdict::fail((w0, n_max), last).with_constant(last.exp());
        v.note = Some("n-th root rising and above 1 across the window".into());
        v
    } else {
        Verdict::inconclusive(last, "n-th root trend not decisive on the window").with_constant(last.exp())
    }
}

/// Largest `x` at which the prefix of `Σ e^{c_m + m x}` has a negligible,
/// geometrically decaying tail.
fn certified_log_range(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    let lse = |x: f64| c.iter().enumerate().fold(f64::NEG_INFINITY, |acc, (m, &cm)| log_add_exp(acc, cm + m as f64 * x));
    let ok = |x: f64| {
        let last = c[n] + n as f64 * x;
        let ratio = c[n] - c[n - 1] + x;
        ratio < 0.0 && last - lse(x) <= crate::numerics::DEFAULT_SERIES_TOL.ln()
    };
    let (mut lo, mut hi) = (-BRACKET_CAP, BRACKET_CAP);
    if !ok(lo) {
        return lo;
    }
    if ok(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Growth-function wrapper around `G(r) = Σ_m e^{c_m} r^m` on its certified range.
fn series_as_growth(c: &[f64], x_max: f64) -> GrowthFunction {
    let coeffs: Arc<Vec<f64>> = Arc::new(c.to_vec());
    GrowthFunction::from_log_eval(
        "generating_function",
        BTreeMap::new(),
        Arc::new(move |r: f64| -> Result<f64, GrowthError> {
            if r == 0.0 {
                return Ok(coeffs[0]);
            }
            let lr = r.ln();
            Ok(coeffs.iter().enumerate().fold(f64::NEG_INFINITY, |acc, (m, &cm)| log_add_exp(acc, cm + m as f64 * lr)))
        }),
        x_max.min(BRACKET_CAP).exp(),
        vec![ClassTag::LogExpConvex, ClassTag::Increasing],
    )
}

/// `ρ(n) = (log inf_r G(r)/r^n - c_n) / n` where the infimum is interior to
/// the certified range; `None` elsewhere.
pub fn b1_profile(c: &[f64]) -> Vec<Option<f64>> {
    let x_max = certified_log_range(c);
    let g = series_as_growth(c, x_max);
    (0..c.len())
        .map(|n| {
            if n == 0 {
                return None;
            }
            match legendre_at(&g, n as f64) {
                Ok(v) => Some((v.ln() - c[n]) / n as f64),
                Err(LegendreError::Numerics(NumericsError::NoBracket { .. })) => None,
                Err(_) => None,
            }
        })
        .collect()
}

fn check_b1(c: &[f64], cfg: &ConditionConfig) -> Verdict {
    let profile = b1_profile(c);
    let pts: Vec<(usize, f64)> = profile.iter().enumerate().filter_map(|(n, v)| v.map(|v| (n, v))).collect();
    if pts.len() < 6 {
        return Verdict::inconclusive(0.0, format!("only {} indices inside the certified range", pts.len()));
    }
    let half = pts.len() / 2;
    let early = pts[..half].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let late = pts[half..].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (n_last, last) = *pts.last().expect("nonempty");
    let note = format!("root profile certified on n <= {n_last}");
    if late <= early + cfg.b1_rise_tol {
        return Verdict::pass(late - early).with_constant(early.max(late).exp()).with_note(note);
    }
    let tail = &pts[half..];
    let rising = tail.windows(2).all(|p| p[1].1 > p[0].1);
    let super_log = tail.windows(2).all(|p| p[1].1 / (p[1].0 as f64).ln() > p[0].1 / (p[0].0 as f64).ln());
    if rising && super_log && last > cfg.b1_fail_floor {
        let mut v = Verdict::fail((tail[0].0, n_last), late - early).with_constant(last.exp());
        v.note = Some(format!("root profile grows faster than log n; {note}"));
        return v;
    }
    Verdict::inconclusive(late - early, format!("root profile rose by {:.3e}; {note}", late - early)).with_constant(late.exp())
}

/// Least concave majorant of `s` on integer nodes.
fn concave_majorant(s: &[f64]) -> Vec<f64> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..s.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or below the chord a..i
            let cross = (s[b] - s[a]) * (i - a) as f64 - (s[i] - s[a]) * (b - a) as f64;
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = vec![0.0; s.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (i, o) in out.iter_mut().enumerate().take(b + 1).skip(a) {
            let t = (i - a) as f64 / (b - a) as f64;
            *o = s[a] + t * (s[b] - s[a]);
        }
    }
    if hull.len() == 1 {
        out[0] = s[0];
    }
    out
}

fn check_near_b2(alpha: &AlphaSequence, cfg: &ConditionConfig) -> Result<Verdict, ConditionError> {
    let la = alpha.logs();
    let bridged: Vec<f64> = la
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let x = n as f64;
            a + ln_factorial(n) - if n == 0 { 0.0 } else { 2.0 * x * x.ln() }
        })
        .collect();
    let route1 = log_shape(&bridged, Shape::LogConcave)?;
    if route1.status == Status::Pass {
        let supported = alpha.source.as_ref().is_some_and(|u| {
            u.claims_class(ClassTag::LogXkConvex(2.0))
                || check_class(u, ClassTag::LogXkConvex(2.0), &GridSpec::default()).is_ok_and(|e| e.verdict == Status::Pass)
        });
        let note = if supported {
            "alpha(n) n!/n^(2n) is log-concave; u is (log, x^2)-convex"
        } else {
            "alpha(n) n!/n^(2n) is log-concave"
        };
        return Ok(route1.with_note(note));
    }
    let lg = alpha.log_gamma();
    let hull = concave_majorant(&lg);
    let eq = sequences_equivalent_with(
        &lg,
        &hull,
        &EquivalenceConfig { window: None, spread_cap: cfg.near_b2_spread_cap },
    )?;
    if eq.holds {
        return Ok(Verdict::pass(eq.spread)
            .with_constant(eq.c2)
            .with_note(format!("equivalent to its concave majorant (K2 = {:.6e}, c2 = {:.6e})", eq.k2, eq.c2)));
    }
    Ok(Verdict::inconclusive(eq.spread, "neither the Stirling bridge nor a concave majorant gives evidence"))
}

fn constant_c1(la: &[f64]) -> Verdict {
    let n_max = la.len() - 1;
    let mut best = (0.0, (0, 1));
    for m in 1..=n_max {
        for n in 0..=m {
            let v = (la[n] - la[m]) / m as f64;
            if v > best.0 {
                best = (v, (n, m));
            }
        }
    }
    finish_constant(best, n_max)
}

fn constant_pairs<F>(la: &[f64], f: F) -> Verdict
where
    F: Fn(usize, usize) -> f64,
{
    let n_max = la.len() - 1;
    let mut best = (0.0, (0, 1));
    for n in 0..=n_max {
        for m in n..=n_max - n {
            if n + m == 0 {
                continue;
            }
            let v = f(n, m) / (n + m) as f64;
            if v > best.0 {
                best = (v, (n, m));
            }
        }
    }
    finish_constant(best, n_max)
}

fn finish_constant((log_c, at): (f64, (usize, usize)), n_max: usize) -> Verdict {
    let mut v = Verdict::pass(0.0).with_constant(log_c.exp()).with_witness(at);
    if !log_c.is_finite() {
        return Verdict::inconclusive(log_c, "constant estimate is not finite");
    }
    if at.0 + at.1 == n_max || at.1 == n_max {
        v.note = Some("maximum attained at the end of the table".into());
    }
    v
}

/// What a report is about.
#[derive(Debug, Clone)]
pub enum Subject {
    Growth(GrowthFunction),
    Alpha(AlphaSequence),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Growth(u) => write!(f, "{u}"),
            Subject::Alpha(a) => write!(f, "{}", a.provenance),
        }
    }
}

/// Every condition, with U evidence for growth subjects.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub subject: String,
    pub n_max: usize,
    pub entries: Vec<(ConditionId, Verdict)>,
    pub u_evidence: Option<Vec<ClassEvidence>>,
    /// Implications with premise PASS and conclusion FAIL.
    pub inconsistencies: Vec<String>,
    pub notes: Vec<String>,
    pub alpha: AlphaSequence,
}

impl ConditionReport {
    pub fn get(&self, id: ConditionId) -> &Verdict {
        &self.entries.iter().find(|(c, _)| *c == id).expect("every condition is reported").1
    }

    pub fn status(&self, id: ConditionId) -> Status {
        self.get(id).status
    }

    pub fn any_fail(&self) -> bool {
        self.entries.iter().any(|(_, v)| v.status == Status::Fail)
            || self.u_evidence.iter().flatten().any(|e| e.verdict == Status::Fail)
    }
}

fn worker_count(cfg: &ConditionConfig) -> usize {
    cfg.threads
        .or_else(|| std::env::var("CKS_TOOLKIT_THREADS").ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&t: &usize| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .min(ConditionId::ALL.len())
}

pub fn full_report(subject: &Subject, n_max: usize) -> Result<ConditionReport, ConditionError> {
    full_report_with(subject, n_max, &ConditionConfig::default())
}

pub fn full_report_with(subject: &Subject, n_max: usize, cfg: &ConditionConfig) -> Result<ConditionReport, ConditionError> {
    if n_max < MIN_CONDITION_N {
        return Err(ConditionError::TooShort { got: n_max, need: MIN_CONDITION_N });
    }
    let mut notes = Vec::new();
    let (alpha, u_evidence) = match subject {
        Subject::Growth(u) => {
            let ev = check_u_conditions(u)?;
            let unmet: Vec<String> =
                ev.iter().filter(|e| e.verdict != Status::Pass).map(|e| format!("{} {}", e.class, e.verdict)).collect();
            if !unmet.is_empty() {
                notes.push(format!(
                    "growth-function hypotheses U0, U2, U3 not all met ({}); sequence conditions are reported without that support",
                    unmet.join(", ")
                ));
            }
            (alpha_from_growth(u, n_max)?, Some(ev))
        }
        Subject::Alpha(a) => {
            if a.n_max() < n_max {
                return Err(ConditionError::TooShort { got: a.n_max(), need: n_max });
            }
            (a.truncated(n_max), None)
        }
    };

    let ids = ConditionId::ALL;
    let workers = worker_count(cfg);
    let mut results: Vec<Option<Verdict>> = vec![None; ids.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let alpha = &alpha;
                scope.spawn(move || {
                    ids.iter()
                        .enumerate()
                        .filter(|(i, _)| i % workers == w)
                        .map(|(i, &id)| {
                            let v = check_condition_with(id, alpha, cfg).unwrap_or_else(|e| {
                                Verdict::inconclusive(0.0, format!("evaluation error: {e}"))
                            });
                            (i, v)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("condition worker panicked") {
                results[i] = Some(v);
            }
        }
    });
    let entries: Vec<(ConditionId, Verdict)> =
        ids.iter().copied().zip(results.into_iter().map(|v| v.expect("all conditions checked"))).collect();

    let status = |id: ConditionId| entries.iter().find(|(c, _)| *c == id).map(|(_, v)| v.status);
    let inconsistencies = IMPLICATIONS
        .iter()
        .filter(|(p, c)| status(*p) == Some(Status::Pass) && status(*c) == Some(Status::Fail))
        .map(|(p, c)| format!("InternalInconsistency: {p} PASS but {c} FAIL"))
        .collect();

    Ok(ConditionReport { subject: subject.to_string(), n_max, entries, u_evidence, inconsistencies, notes, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(u: GrowthFunction, n: usize) -> AlphaSequence {
        alpha_from_growth(&u, n).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for id in ConditionId::ALL {
            assert_eq!(ConditionId::parse(id.name()), Some(id));
        }
    }

    #[test]
    fn constant_sequence() {
        let a = AlphaSequence::from_logs("ones", vec![0.0; 40]).unwrap();
        let v = check_condition(ConditionId::A1, &a).unwrap();
        assert_eq!(v.status, Status::Pass);
        assert_eq!(v.constant, Some(1.0));
        for id in [ConditionId::B2, ConditionId::B3] {
            assert_eq!(check_condition(id, &a).unwrap().status, Status::Pass);
        }
        for id in [ConditionId::C1, ConditionId::C2, ConditionId::C3] {
            let v = check_condition(id, &a).unwrap();
            assert_eq!(v.status, Status::Pass);
            assert_eq!(v.constant, Some(1.0));
        }
    }

    #[test]
    fn a1_rejects_alpha0() {
        let a = AlphaSequence::from_logs("shifted", vec![0.5; 20]).unwrap();
        let v = check_condition(ConditionId::A1, &a).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness, Some((0, 0)));
    }

    #[test]
    fn exp_scaled_sigma() {
        let a = alpha(GrowthFunction::exp_scaled(1.0).unwrap(), 100);
        let v = check_condition(ConditionId::A1, &a).unwrap();
        assert_eq!(v.status, Status::Pass);
        assert!(v.constant.unwrap() <= 2f64.sqrt() * (1.0 + 1e-8));
        assert_eq!(check_condition(ConditionId::B2, &a).unwrap().status, Status::Pass);
    }

    #[test]
    fn ks_constants() {
        let a = alpha(GrowthFunction::ks(0.5).unwrap(), 60);
        let c2 = check_condition(ConditionId::C2, &a).unwrap();
        assert_eq!(c2.status, Status::Pass);
        assert!(c2.constant.unwrap() <= 4.0 * (1.0 + 1e-6));
        let c3 = check_condition(ConditionId::C3, &a).unwrap();
        assert!(c3.constant.unwrap() <= 2.0 * (1.0 + 1e-6));
        assert_eq!(check_condition(ConditionId::B2Tilde, &a).unwrap().status, Status::Pass);
    }

    #[test]
    fn candidate_assert_mode() {
        // 1/n! has binomial ratios, so the tight C3 constant is 2
        let logs = (0..=30).map(crate::numerics::ln_factorial).map(|l| -l).collect();
        let a = AlphaSequence::from_logs("inv_fact", logs).unwrap();
        let mut cfg = ConditionConfig::default();
        cfg.candidates.insert(ConditionId::C3, 1.5);
        let v = check_condition_with(ConditionId::C3, &a, &cfg).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.witness.is_some());
        cfg.candidates.insert(ConditionId::C3, 2.0);
        assert_eq!(check_condition_with(ConditionId::C3, &a, &cfg).unwrap().status, Status::Pass);
    }

    #[test]
    fn majorant_is_concave_and_above() {
        let s = [0.0, -3.0, 1.0, 0.5, -4.0, 2.0, 1.0];
        let h = concave_majorant(&s);
        for i in 0..s.len() {
            assert!(h[i] >= s[i] - 1e-12);
        }
        assert_eq!(log_shape(&h, Shape::LogConcave).unwrap().status, Status::Pass);
    }

    #[test]
    fn too_short() {
        let a = AlphaSequence::from_logs("short", vec![0.0; 5]).unwrap();
        assert!(matches!(check_condition(ConditionId::A1, &a), Err(ConditionError::TooShort { .. })));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let subject = Subject::Growth(GrowthFunction::ks(0.25).unwrap());
        let one = full_report_with(&subject, 30, &ConditionConfig { threads: Some(1), ..Default::default() }).unwrap();
        let many = full_report_with(&subject, 30, &ConditionConfig { threads: Some(5), ..Default::default() }).unwrap();
        assert_eq!(one.entries, many.entries);
    }
}
