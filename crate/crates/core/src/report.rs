//! Diff-stable JSON for reports and certificates.
//!
//! Objects are `serde_json::Map`, which keeps keys sorted. Floats are rounded
//! to 15 significant digits and non-finite values become strings, so the same
//! inputs always produce byte-identical output.

use serde_json::{json, Map, Value};

use crate::conditions::ConditionReport;
use crate::equivalence::{EquivalenceCertificate, ExampleReport, TripleEquivalence};
use crate::growth::{ClassEvidence, GridSpec, GrowthFunction};
use crate::legendre::IdentityCheck;
use crate::sequences::SequenceEquivalence;
use crate::verdict::Verdict;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float rounded to 15 significant digits, or a string for `inf`/`nan`.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("nan".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float reparses");
    // Integral values stay floats so the type of a field never flips.
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn opt_str(s: &Option<String>) -> Value {
    s.as_ref().map_or(Value::Null, |s| Value::String(s.clone()))
}

fn pair(w: Option<(usize, usize)>) -> Value {
    w.map_or(Value::Null, |(n, m)| json!([n, m]))
}

pub fn verdict_json(name: &str, v: &Verdict) -> Value {
    json!({
        "name": name,
        "status": v.status.as_str(),
        "constant": opt_num(v.constant),
        "witness": pair(v.witness),
        "margin": num(v.margin),
        "note": opt_str(&v.note),
    })
}

pub fn evidence_json(e: &ClassEvidence) -> Value {
    json!({
        "class": e.class.to_string(),
        "status": e.verdict.as_str(),
        "witness": e.witness.map_or(Value::Null, |w| Value::Array(w.iter().copied().map(num).collect())),
        "margin": num(e.margin),
        "gridPoints": e.grid_points,
        "note": opt_str(&e.note),
    })
}

pub fn certificate_json(left: &str, right: &str, c: &EquivalenceCertificate) -> Value {
    json!({
        "left": left,
        "right": right,
        "c1": num(c.c1),
        "a1": num(c.a1),
        "c2": num(c.c2),
        "a2": num(c.a2),
        "testedRange": [num(c.tested_range.0), num(c.tested_range.1)],
        "gridSize": c.grid_size,
        "holds": c.holds,
        "worstMargin": num(c.worst_margin),
        "note": opt_str(&c.note),
    })
}

pub fn triple_json(t: &TripleEquivalence) -> Vec<Value> {
    t.certificates.iter().map(|(l, r, c)| certificate_json(l, r, c)).collect()
}

pub fn identity_json(c: &IdentityCheck) -> Value {
    json!({
        "name": c.name,
        "status": c.status.as_str(),
        "constant": opt_num(c.constant),
        "witness": pair(c.witness),
        "margin": num(c.worst_margin),
        "note": opt_str(&c.note),
    })
}

pub fn sequence_equivalence_json(s: &SequenceEquivalence) -> Value {
    json!({
        "K1": num(s.k1),
        "c1": num(s.c1),
        "K2": num(s.k2),
        "c2": num(s.c2),
        "testedN": s.tested_n,
        "holds": s.holds,
        "spread": num(s.spread),
        "window": [s.window.0, s.window.1],
    })
}

pub fn example_json(r: &ExampleReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "status": c.status.as_str(),
                "value": num(c.value),
                "tolerance": num(c.tolerance),
                "note": opt_str(&c.note),
            })
        })
        .collect();
    let example = match r.example {
        crate::equivalence::Example::Ks { beta } => json!({"name": "ks", "beta": num(beta)}),
        crate::equivalence::Example::Bell { k } => json!({"name": "bell", "k": k}),
    };
    json!({
        "example": example,
        "N": r.n_max,
        "checks": checks,
        "certificates": r.certificate.iter().map(|c| certificate_json("exp_k", "bell_dual_star", c)).collect::<Vec<_>>(),
        "sequenceEquivalence": r.sequence_equivalence.as_ref().map_or(Value::Null, sequence_equivalence_json),
        "allPass": r.all_pass(),
        "toolVersion": TOOL_VERSION,
    })
}

pub fn params_json(u: Option<&GrowthFunction>) -> Value {
    let mut m = Map::new();
    if let Some(u) = u {
        for (k, v) in u.params() {
            m.insert(k.clone(), num(*v));
        }
        if let Some(e) = u.expression() {
            m.insert("expr".into(), Value::String(e.into()));
        }
    }
    Value::Object(m)
}

pub fn grid_json(g: &GridSpec) -> Value {
    json!({
        "rMin": opt_num(g.points.first().copied()),
        "rMax": opt_num(g.points.last().copied()),
        "points": g.len(),
    })
}

/// The full report document: conditions, U evidence and any certificates.
pub fn condition_report_json(
    rep: &ConditionReport,
    u: Option<&GrowthFunction>,
    certificates: Vec<Value>,
) -> Value {
    let conditions: Vec<Value> = rep.entries.iter().map(|(id, v)| verdict_json(id.name(), v)).collect();
    let grid = if rep.u_evidence.is_some() { grid_json(&GridSpec::default()) } else { Value::Null };
    json!({
        "subject": rep.subject,
        "params": params_json(u),
        "N": rep.n_max,
        "grid": grid,
        "conditions": conditions,
        "uEvidence": rep.u_evidence.iter().flatten().map(evidence_json).collect::<Vec<_>>(),
        "certificates": certificates,
        "inconsistencies": rep.inconsistencies,
        "notes": rep.notes,
        "toolVersion": TOOL_VERSION,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
