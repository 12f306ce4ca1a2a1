//! The `cks-toolkit` command line.
//!
//! Every subcommand shares one flag set. A `--config` JSON file can supply any
//! of the flags by their long name; flags given on the command line win.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::conditions::{full_report_with, ConditionConfig, Subject};
use crate::equivalence::{verify_examples, verify_thm27, Example};
use crate::growth::{make_catalog, parse_growth, GridSpec, GrowthFunction, CATALOG};
use crate::legendre::{dual_legendre_at, l_function_at, l_sharp_at, legendre_at, legendre_table};
use crate::numerics::LogValue;
use crate::report::{self, num, TOOL_VERSION};
use crate::sequences::{alpha_from_growth, AlphaSequence};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cks-toolkit", version, about = "Growth functions, Legendre transforms and CKS weight conditions")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in growth functions.
    Catalog(Flags),
    /// ℓ_u(t) at one point, or the table for n = 0..N.
    Legendre(Flags),
    /// The dual transform u*(r).
    Dual(Flags),
    /// The weight sequence α(n) = 1/(ℓ_u(n) n!).
    Alpha(Flags),
    /// L_u(r) = Σ ℓ_u(n) r^n.
    Lfun(Flags),
    /// L#_u(r) = Σ r^n / (ℓ_u(n) (n!)^2).
    Lsharp(Flags),
    /// Full condition report for a growth function or a sequence file.
    Check(Flags),
    /// Equivalence certificates among u*, L_{u*} and L#_u.
    Equiv(Flags),
    /// Reproduce the KS or Bell worked example.
    Examples(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
struct Flags {
    /// Catalog name (ks, ks_dual, exp_k, bell_dual, exp_scaled) or `custom`.
    #[arg(long)]
    function: Option<String>,
    /// Expression in r, e.g. "exp(r^2) + 1".
    #[arg(long)]
    expr: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    strict: bool,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Sequence CSV for `check`, as written by `alpha --format csv`.
    #[arg(long)]
    sequence: Option<PathBuf>,
}

impl Flags {
    fn or(self, file: Flags) -> Flags {
        Flags {
            function: self.function.or(file.function),
            expr: self.expr.or(file.expr),
            beta: self.beta.or(file.beta),
            k: self.k.or(file.k),
            a: self.a.or(file.a),
            n: self.n.or(file.n),
            t: self.t.or(file.t),
            r: self.r.or(file.r),
            rmin: self.rmin.or(file.rmin),
            rmax: self.rmax.or(file.rmax),
            points: self.points.or(file.points),
            tol: self.tol.or(file.tol),
            format: self.format.or(file.format),
            out: self.out.or(file.out),
            strict: self.strict || file.strict,
            config: self.config,
            sequence: self.sequence.or(file.sequence),
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric { module: &'static str, message: String },
    Io(String),
}

macro_rules! numeric_from {
    ($($t:ty => $name:literal),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numeric { module: $name, message: e.to_string() }
            }
        }
    )*};
}

numeric_from!(
    crate::growth::GrowthError => "GrowthError",
    crate::legendre::LegendreError => "LegendreError",
    crate::sequences::SequenceError => "SequenceError",
    crate::conditions::ConditionError => "ConditionError",
    crate::equivalence::EquivalenceError => "EquivalenceError"
);

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What a subcommand produced.
struct Output {
    body: String,
    summary: String,
    failed: bool,
}

/// Runs the CLI against the process's standard streams.
pub fn run_cli(argv: Vec<String>) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI, writing to the given streams. Returns the exit code.
pub fn run_cli_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.cmd) {
        Ok((o, flags)) => {
            let written = match &flags.out {
                Some(path) => write_atomic(path, &o.body).map(|_| writeln!(out, "{}", o.summary)),
                None => Ok(out.write_all(o.body.as_bytes())),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error[Io]: {e}");
                return EXIT_NUMERIC;
            }
            if flags.strict && o.failed {
                EXIT_FAIL
            } else {
                EXIT_OK
            }
        }
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Numeric { module, message }) => {
            let _ = writeln!(err, "error[{module}]: {message}");
            EXIT_NUMERIC
        }
        Err(CliError::Io(m)) => {
            let _ = writeln!(err, "error[Io]: {m}");
            EXIT_NUMERIC
        }
    }
}

/// Writes to a sibling temp file, then renames over the target.
fn write_atomic(path: &Path, body: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(body.as_bytes())?;
        f.sync_all()
    });
    match res.and_then(|_| fs::rename(&tmp, path)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn load_flags(flags: Flags) -> Result<Flags, CliError> {
    let merged = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
            let file: Flags =
                serde_json::from_str(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
            flags.or(file)
        }
        None => flags,
    };
    if let Some(tol) = merged.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(usage(format!("--tol must be positive, got {tol}")));
        }
    }
    if let Some(n) = merged.n {
        if n < 2 {
            return Err(usage(format!("--N must be at least 2, got {n}")));
        }
    }
    if let (Some(lo), Some(hi)) = (merged.rmin, merged.rmax) {
        if !(lo < hi) {
            return Err(usage(format!("--rmin must be below --rmax, got {lo} >= {hi}")));
        }
    }
    Ok(merged)
}

fn growth_from(flags: &Flags) -> Result<GrowthFunction, CliError> {
    let name = flags.function.as_deref();
    match (&flags.expr, name) {
        (Some(e), None | Some("custom")) => parse_growth(e).map_err(|e| usage(format!("--expr: {e}"))),
        (Some(_), Some(n)) => Err(usage(format!("--expr conflicts with --function {n}"))),
        (None, Some("custom")) => Err(usage("--function custom needs --expr")),
        (None, Some(n)) => {
            let mut params = BTreeMap::new();
            for (key, v) in [("beta", flags.beta), ("k", flags.k), ("a", flags.a)] {
                if let Some(v) = v {
                    params.insert(key.to_string(), v);
                }
            }
            make_catalog(n, &params).map_err(|e| usage(format!("--function {n}: {e}")))
        }
        (None, None) => Err(usage("missing --function or --expr")),
    }
}

/// Explicit `--r`, or a geometric grid from `--rmin/--rmax/--points`.
fn abscissas(flags: &Flags, default: (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
    if let Some(r) = flags.r {
        if !(r >= 0.0) {
            return Err(usage(format!("--r must be nonnegative, got {r}")));
        }
        return Ok(vec![r]);
    }
    let lo = flags.rmin.unwrap_or(default.0);
    let hi = flags.rmax.unwrap_or(default.1);
    let n = flags.points.unwrap_or(default.2);
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(usage(format!("grid needs 0 < rmin < rmax and points >= 2, got [{lo}, {hi}] x {n}")));
    }
    Ok(GridSpec::geometric(lo, hi, n).points)
}

fn real_or_log(l: LogValue) -> String {
    let x = l.to_real();
    if l.is_zero() {
        "0".into()
    } else if x.is_finite() && x >= 1e-300 {
        format!("{x}")
    } else {
        format!("exp({})", l.ln())
    }
}

/// A table of `(r, log value)` rows in the requested format.
fn point_rows(
    label: &str,
    subject: &GrowthFunction,
    rows: &[(f64, LogValue)],
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from("r,log_value\n");
            for (r, l) in rows {
                s.push_str(&format!("{r:?},{:?}\n", l.ln()));
            }
            s
        }
        Format::Json => report::to_json_string(&json!({
            "quantity": label,
            "subject": subject.to_string(),
            "params": report::params_json(Some(subject)),
            "values": rows.iter().map(|(r, l)| json!({"r": num(*r), "logValue": num(l.ln())})).collect::<Vec<_>>(),
            "toolVersion": TOOL_VERSION,
        })),
        Format::Text => rows.iter().map(|(r, l)| format!("{label}({r}) = {}\n", real_or_log(*l))).collect(),
    }
}

fn execute(cmd: Command) -> Result<(Output, Flags), CliError> {
    let (name, flags) = match cmd {
        Command::Catalog(f) => ("catalog", f),
        Command::Legendre(f) => ("legendre", f),
        Command::Dual(f) => ("dual", f),
        Command::Alpha(f) => ("alpha", f),
        Command::Lfun(f) => ("lfun", f),
        Command::Lsharp(f) => ("lsharp", f),
        Command::Check(f) => ("check", f),
        Command::Equiv(f) => ("equiv", f),
        Command::Examples(f) => ("examples", f),
    };
    let flags = load_flags(flags)?;
    let format = flags.format.unwrap_or(if flags.out.is_some() { Format::Json } else { Format::Text });
    let out = match name {
        "catalog" => catalog(format)?,
        "legendre" => legendre(&flags, format)?,
        "dual" => {
            let u = growth_from(&flags)?;
            let rs = abscissas(&flags, (0.1, 10.0, 10))?;
            let rows: Vec<(f64, LogValue)> =
                rs.iter().map(|&r| Ok((r, dual_legendre_at(&u, r)?))).collect::<Result<_, CliError>>()?;
            let body = point_rows("u*", &u, &rows, format);
            Output { body, summary: format!("dual {u}: {} values", rows.len()), failed: false }
        }
        "alpha" => {
            let u = growth_from(&flags)?;
            let n = flags.n.unwrap_or(50);
            let seq = alpha_from_growth(&u, n)?;
            let body = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    seq.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                Format::Json => report::to_json_string(&json!({
                    "subject": u.to_string(),
                    "params": report::params_json(Some(&u)),
                    "N": n,
                    "logAlpha": seq.logs().into_iter().map(num).collect::<Vec<_>>(),
                    "toolVersion": TOOL_VERSION,
                })),
                Format::Text => seq.logs().iter().enumerate().map(|(i, l)| format!("log alpha({i}) = {l}\n")).collect(),
            };
            Output { body, summary: format!("alpha {u}: n = 0..{n}"), failed: false }
        }
        "lfun" | "lsharp" => {
            let u = growth_from(&flags)?;
            let table = legendre_table(&u, flags.n.unwrap_or(200))?;
            let rs = abscissas(&flags, (0.1, 10.0, 10))?;
            let eval = if name == "lfun" { l_function_at } else { l_sharp_at };
            let rows: Vec<(f64, LogValue)> =
                rs.iter().map(|&r| Ok((r, eval(&table, r)?.sum))).collect::<Result<_, CliError>>()?;
            let label = if name == "lfun" { "L" } else { "L#" };
            Output {
                body: point_rows(label, &u, &rows, format),
                summary: format!("{name} {u}: {} values", rows.len()),
                failed: false,
            }
        }
        "check" => check(&flags, format)?,
        "equiv" => {
            let u = growth_from(&flags)?;
            let n = flags.n.unwrap_or(64);
            let range = (flags.rmin.unwrap_or(0.1), flags.rmax.unwrap_or(5.0));
            let rep = verify_thm27(&u, n, range, flags.points.unwrap_or(30))?;
            let failed = rep.status == crate::verdict::Status::Fail;
            let doc = json!({
                "subject": u.to_string(),
                "params": report::params_json(Some(&u)),
                "N": n,
                "status": rep.status.as_str(),
                "certificates": report::triple_json(&rep),
                "note": rep.note,
                "toolVersion": TOOL_VERSION,
            });
            let body = match format {
                Format::Json => report::to_json_string(&doc),
                Format::Csv => {
                    let mut s = String::from("left,right,c1,a1,c2,a2,holds,worst_margin\n");
                    for (l, r, c) in &rep.certificates {
                        s.push_str(&format!("{l},{r},{:?},{:?},{:?},{:?},{},{:?}\n", c.c1, c.a1, c.c2, c.a2, c.holds, c.worst_margin));
                    }
                    s
                }
                Format::Text => {
                    let mut s = format!("{} {}\n", u, rep.status);
                    if let Some(n) = &rep.note {
                        s.push_str(&format!("  {n}\n"));
                    }
                    for (l, r, c) in &rep.certificates {
                        s.push_str(&format!(
                            "  {l} ~ {r}: holds={} c1={} a1={} c2={} a2={}\n",
                            c.holds, c.c1, c.a1, c.c2, c.a2
                        ));
                    }
                    s
                }
            };
            Output { body, summary: format!("equiv {u}: {}", rep.status), failed }
        }
        "examples" => {
            let which = match flags.function.as_deref() {
                Some("ks") => Example::Ks { beta: flags.beta.unwrap_or(0.0) },
                Some("bell" | "bell_dual") => {
                    let k = flags.k.unwrap_or(2.0);
                    if k.fract() != 0.0 || k < 0.0 {
                        return Err(usage(format!("--k must be an integer, got {k}")));
                    }
                    Example::Bell { k: k as u32 }
                }
                other => return Err(usage(format!("examples needs --function ks or bell, got {other:?}"))),
            };
            let n = flags.n.unwrap_or(60);
            let rep = verify_examples(which, n)?;
            let body = match format {
                Format::Json => report::to_json_string(&report::example_json(&rep)),
                Format::Csv => {
                    let mut s = String::from("name,status,value,tolerance\n");
                    for c in &rep.checks {
                        s.push_str(&format!("{},{},{:?},{:?}\n", c.name, c.status, c.value, c.tolerance));
                    }
                    s
                }
                Format::Text => rep
                    .checks
                    .iter()
                    .map(|c| format!("{:<28} {:<12} value={:e} tol={:e}\n", c.name, c.status.as_str(), c.value, c.tolerance))
                    .collect(),
            };
            Output {
                summary: format!("examples {which:?}: {}", if rep.all_pass() { "PASS" } else { "FAIL" }),
                failed: !rep.all_pass(),
                body,
            }
        }
        _ => unreachable!("every subcommand is dispatched"),
    };
    Ok((out, flags))
}

fn catalog(format: Format) -> Result<Output, CliError> {
    let defaults: BTreeMap<&str, f64> = [("beta", 0.5), ("k", 2.0), ("a", 1.0)].into();
    let mut entries = Vec::new();
    for (name, params) in CATALOG {
        let p: BTreeMap<String, f64> = params.iter().map(|k| (k.to_string(), defaults[k])).collect();
        let u = make_catalog(name, &p)?;
        entries.push((name, params, u));
    }
    let body = match format {
        Format::Json => report::to_json_string(&Value::Array(
            entries
                .iter()
                .map(|(name, params, u)| {
                    json!({
                        "name": name,
                        "params": params,
                        "claims": u.claims().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "hasClosedFormDual": u.closed_form_dual().is_some(),
                    })
                })
                .collect(),
        )),
        Format::Csv => {
            let mut s = String::from("name,params\n");
            for (name, params, _) in &entries {
                s.push_str(&format!("{name},{}\n", params.join(";")));
            }
            s
        }
        Format::Text => entries
            .iter()
            .map(|(name, params, u)| {
                let claims: Vec<String> = u.claims().iter().map(|c| c.to_string()).collect();
                format!("{name:<12} [{}]  {}\n", params.join(", "), claims.join(" "))
            })
            .collect(),
    };
    Ok(Output { body, summary: format!("catalog: {} entries", entries.len()), failed: false })
}

fn legendre(flags: &Flags, format: Format) -> Result<Output, CliError> {
    let u = growth_from(flags)?;
    if let Some(t) = flags.t {
        if !(t >= 0.0) {
            return Err(usage(format!("--t must be nonnegative, got {t}")));
        }
        let l = legendre_at(&u, t)?;
        let body = match format {
            Format::Text => format!("{}\n", real_or_log(l)),
            _ => point_rows("ell", &u, &[(t, l)], format),
        };
        return Ok(Output { summary: format!("legendre {u} t={t}: {}", real_or_log(l)), body, failed: false });
    }
    let n = flags.n.unwrap_or(20);
    let table = legendre_table(&u, n)?;
    let body = match format {
        Format::Csv => {
            let mut s = String::from("n,log_ell,argmin_r\n");
            for (i, (l, a)) in table.log_ell.iter().zip(&table.argmin).enumerate() {
                s.push_str(&format!("{i},{:?},{a:?}\n", l.ln()));
            }
            s
        }
        Format::Json => report::to_json_string(&json!({
            "subject": u.to_string(),
            "params": report::params_json(Some(&u)),
            "N": n,
            "certifiedConvex": table.certified_convex,
            "logEll": table.log_ell.iter().map(|l| num(l.ln())).collect::<Vec<_>>(),
            "argmin": table.argmin.iter().map(|&a| num(a)).collect::<Vec<_>>(),
            "toolVersion": TOOL_VERSION,
        })),
        Format::Text => table
            .log_ell
            .iter()
            .zip(&table.argmin)
            .enumerate()
            .map(|(i, (l, a))| format!("{i:>5}  log_ell={:<24} argmin_r={a}\n", l.ln()))
            .collect(),
    };
    Ok(Output { body, summary: format!("legendre {u}: table n = 0..{n}"), failed: false })
}

fn check(flags: &Flags, format: Format) -> Result<Output, CliError> {
    let (subject, u) = match &flags.sequence {
        Some(path) => {
            if flags.function.is_some() || flags.expr.is_some() {
                return Err(usage("--sequence conflicts with --function/--expr"));
            }
            let f = fs::File::open(path).map_err(|e| usage(format!("--sequence {}: {e}", path.display())))?;
            (Subject::Alpha(AlphaSequence::read_csv(BufReader::new(f))?), None)
        }
        None => {
            let u = growth_from(flags)?;
            (Subject::Growth(u.clone()), Some(u))
        }
    };
    let n = match (&subject, flags.n) {
        (_, Some(n)) => n,
        (Subject::Alpha(a), None) => a.n_max(),
        (Subject::Growth(_), None) => 100,
    };
    let mut cfg = ConditionConfig::default();
    if let Some(tol) = flags.tol {
        cfg.slack = tol;
    }
    let rep = full_report_with(&subject, n, &cfg)?;
    let body = match format {
        Format::Json => report::to_json_string(&report::condition_report_json(&rep, u.as_ref(), Vec::new())),
        Format::Csv => {
            let mut s = String::from("name,status,constant,witness_n,witness_m,margin\n");
            for (id, v) in &rep.entries {
                let (wn, wm) = v.witness.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
                let c = v.constant.map_or(String::new(), |c| format!("{c:?}"));
                s.push_str(&format!("{},{},{c},{wn},{wm},{:?}\n", id.name(), v.status, v.margin));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{} (N = {})\n", rep.subject, rep.n_max);
            for e in rep.u_evidence.iter().flatten() {
                s.push_str(&format!("  {:<10} {}\n", e.class.to_string(), e.verdict));
            }
            for (id, v) in &rep.entries {
                s.push_str(&format!("  {:<10} {}", id.name(), v.status));
                if let Some(c) = v.constant {
                    s.push_str(&format!("  constant={c}"));
                }
                if let Some((a, b)) = v.witness {
                    s.push_str(&format!("  witness=({a}, {b})"));
                }
                s.push('\n');
            }
            for line in rep.notes.iter().chain(&rep.inconsistencies) {
                s.push_str(&format!("  note: {line}\n"));
            }
            s
        }
    };
    let count = |st: crate::verdict::Status| rep.entries.iter().filter(|(_, v)| v.status == st).count();
    let summary = format!(
        "check {}: {} PASS, {} FAIL, {} INCONCLUSIVE",
        rep.subject,
        count(crate::verdict::Status::Pass),
        count(crate::verdict::Status::Fail),
        count(crate::verdict::Status::Inconclusive)
    );
    Ok(Output { body, summary, failed: rep.any_fail() })
}
