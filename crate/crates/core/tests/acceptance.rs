//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its own PASS/FAIL line even when the suite succeeds.

use std::time::Instant;

use cks_toolkit::conditions::{full_report, ConditionId, Subject, IMPLICATIONS};
use cks_toolkit::equivalence::find_equivalence;
use cks_toolkit::growth::{ClassTag, GridSpec, GrowthFunction};
use cks_toolkit::legendre::{
    dual_legendre_at, l_function_at, l_function_growth, l_sharp_at, legendre_at, legendre_table, numeric_dual,
    reconstruct_at, verify_legendre_identities,
};
use cks_toolkit::numerics::ln_factorial;
use cks_toolkit::sequences::{
    alpha_from_growth, alpha_from_table, bell_numbers, egf_eval, sequences_equivalent_with, AlphaSequence, Egf,
    EquivalenceConfig,
};
use cks_toolkit::Status;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BETAS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ks(beta: f64) -> GrowthFunction {
    GrowthFunction::ks(beta).unwrap()
}

fn catalog() -> Vec<GrowthFunction> {
    let mut v: Vec<GrowthFunction> = BETAS.iter().map(|&b| ks(b)).collect();
    v.push(GrowthFunction::ks_dual(0.25).unwrap());
    v.push(GrowthFunction::ks_dual(0.5).unwrap());
    v.push(GrowthFunction::exp_k(2).unwrap());
    v.push(GrowthFunction::exp_k(3).unwrap());
    v.push(GrowthFunction::bell_dual(2).unwrap());
    v.push(GrowthFunction::bell_dual(3).unwrap());
    for a in [0.5, 1.0, 2.0] {
        v.push(GrowthFunction::exp_scaled(a).unwrap());
    }
    v
}

fn legendre_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in BETAS {
        let t = legendre_table(&ks(beta), 100).map_err(|e| e.to_string())?;
        for n in 1..=100 {
            let x = n as f64;
            worst = worst.max((t.log_ell[n].ln() - (1.0 + beta) * x * (1.0 - x.ln())).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.3e} (tol 1e-6)"))
}

fn dual_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in BETAS {
        let u = ks(beta);
        for r in GridSpec::geometric(1e-3, 1e3, 50).points {
            let want = (1.0 - beta) * r.powf(1.0 / (1.0 - beta));
            let got = dual_legendre_at(&u, r).map_err(|e| format!("beta={beta} r={r}: {e}"))?.ln();
            worst = worst.max((got - want).abs() / want.max(1.0));
        }
    }
    ensure(worst <= 1e-5, || format!("max scaled residual {worst:e}"))?;
    Ok(format!("max scaled residual {worst:.3e} (tol 1e-5)"))
}

fn dual_legendre_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in BETAS {
        let u = ks(beta);
        let lu = legendre_table(&u, 50).map_err(|e| e.to_string())?;
        let ld = legendre_table(&numeric_dual(&u), 50).map_err(|e| e.to_string())?;
        for n in 1..=50 {
            let x = n as f64;
            let want = 2.0 * x - lu.log_ell[n].ln() - 2.0 * x * x.ln();
            worst = worst.max((ld.log_ell[n].ln() - want).abs());
        }
    }
    ensure(worst <= 1e-5, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.3e} (tol 1e-5)"))
}

fn reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    for u in catalog().into_iter().filter(|u| u.claims_class(ClassTag::LogExpConvex)) {
        // exp_k overflows f64 (or pushes the optimal order past the t cap)
        // well before r = 1e3, so it is tested on its evaluable stretch
        let top = match (u.name(), u.param("k")) {
            ("exp_k", Some(k)) if k == 2.0 => 10.0,
            ("exp_k", Some(_)) => 1.5,
            _ => 1e3,
        };
        let table = legendre_table(&u, 64).map_err(|e| e.to_string())?;
        for r in GridSpec::geometric(1e-3, top, 25).points {
            let got = reconstruct_at(&table, r).map_err(|e| format!("{u} r={r}: {e}"))?.ln();
            let want = u.log_eval(r).unwrap();
            let d = (got - want).abs();
            if d > worst {
                worst = d;
            }
            ensure(d <= 1e-6, || format!("{u} at r={r}: residual {d:e}"))?;
        }
        tested += 1;
    }
    Ok(format!("{tested} functions, max residual {worst:.3e} (tol 1e-6)"))
}

fn lfunction_upper_bound() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for beta in [0.0, 0.5] {
        let u = ks(beta);
        let top = 1e2;
        let l = l_function_growth(&u, 1.01 * top).map_err(|e| e.to_string())?;
        for r in GridSpec::geometric(1e-3, top, 40).points {
            let lhs = l.log_eval(r).map_err(|e| e.to_string())?;
            let rhs = 2.0 + u.log_eval(std::f64::consts::E * r).unwrap();
            worst = worst.max(lhs - rhs);
            ensure(lhs <= rhs + 1e-8, || format!("beta={beta} r={r}: excess {:e}", lhs - rhs))?;
        }
    }
    Ok(format!("largest log L - bound {worst:.3e} (allowed 1e-8)"))
}

fn legendre_inequalities() -> Outcome {
    let mut checked = 0;
    let mut skipped = 0;
    for u in catalog() {
        for k in [1.0, 2.0] {
            let checks = verify_legendre_identities(&u, 100, k).map_err(|e| format!("{u}: {e}"))?;
            for c in checks.iter().filter(|c| c.name != "dual_transform_identity") {
                match c.status {
                    Status::Fail => return Err(format!("{u} k={k}: {} violated at {:?}", c.name, c.witness)),
                    Status::Skipped => skipped += 1,
                    _ => checked += 1,
                }
            }
        }
    }
    Ok(format!("{checked} inequality checks without violation, {skipped} skipped for missing hypotheses"))
}

fn ks_end_to_end() -> Outcome {
    use ConditionId::*;
    let want = [A1, A2, A2Tilde, NearB2, B2Tilde, B1Tilde, C1, C2, C3];
    for beta in BETAS {
        let rep = full_report(&Subject::Growth(ks(beta)), 100).map_err(|e| e.to_string())?;
        for id in want {
            ensure(rep.status(id) == Status::Pass, || format!("beta={beta}: {id} is {}", rep.status(id)))?;
        }
        let c2 = rep.get(C2).constant.unwrap();
        let c3 = rep.get(C3).constant.unwrap();
        ensure(c2 <= 4.0 * (1.0 + 1e-6) && c3 <= 2.0 * (1.0 + 1e-6), || format!("beta={beta}: c2={c2}, c3={c3}"))?;
    }
    Ok("all nine conditions PASS for four betas; c2 <= 4, c3 <= 2".into())
}

fn random_walk(rng: &mut ChaCha8Rng, kind: usize, n: usize) -> Vec<f64> {
    let mut logs = vec![0.0];
    let mut step: f64 = rng.gen_range(-2.0..2.0);
    for _ in 0..n {
        match kind {
            0 => step = rng.gen_range(-2.0..2.0),
            1 => step += rng.gen_range(0.0..0.3),
            _ => step -= rng.gen_range(0.0..0.3),
        }
        logs.push(logs.last().unwrap() + step);
    }
    logs
}

fn implication_lattice() -> Outcome {
    let mut subjects: Vec<Subject> = catalog().into_iter().map(Subject::Growth).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(20240917);
    for i in 0..100 {
        let logs = random_walk(&mut rng, i % 3, 60);
        subjects.push(Subject::Alpha(AlphaSequence::from_logs(format!("walk{i}"), logs).unwrap()));
    }
    let mut reports = 0;
    for s in &subjects {
        let n = match s {
            Subject::Alpha(_) => 60,
            Subject::Growth(_) => 100,
        };
        let rep = full_report(s, n).map_err(|e| format!("{s}: {e}"))?;
        for (p, c) in IMPLICATIONS {
            ensure(!(rep.status(p) == Status::Pass && rep.status(c) == Status::Fail), || {
                format!("{s}: {p} PASS but {c} FAIL")
            })?;
        }
        ensure(rep.inconsistencies.is_empty(), || format!("{s}: {:?}", rep.inconsistencies))?;
        reports += 1;
    }
    Ok(format!("{reports} reports, no premise-PASS/conclusion-FAIL"))
}

fn bell_oracle(n_max: usize) -> Vec<f64> {
    // Bell triangle; every step adds positive numbers
    let mut row = vec![1.0f64];
    let mut out = vec![1.0];
    for _ in 0..n_max {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        out.push(next[0]);
        row = next;
    }
    out
}

fn bell_numbers_b2() -> Outcome {
    let b = bell_numbers(2, 60).map_err(|e| e.to_string())?;
    let first: Vec<f64> = (0..=5).map(|n| b.value(n)).collect();
    ensure(first == [1.0, 1.0, 2.0, 5.0, 15.0, 52.0], || format!("b2(0..5) = {first:?}"))?;
    let oracle = bell_oracle(60);
    let mut worst: f64 = 0.0;
    for (n, want) in oracle.iter().enumerate() {
        worst = worst.max((b.value(n) - want).abs() / want);
    }
    ensure(worst <= 1e-10, || format!("relative error {worst:e}"))?;
    use ConditionId::*;
    let rep = full_report(&Subject::Alpha(b.alpha()), 60).map_err(|e| e.to_string())?;
    for id in [A1, A2, B1, B2, B3, C1, C2, C3] {
        ensure(rep.status(id) == Status::Pass, || format!("{id} is {}: {:?}", rep.status(id), rep.get(id).note))?;
    }
    Ok(format!("exact prefix, recurrence error {worst:.3e}, eight conditions PASS"))
}

fn egf_cross_paths() -> Outcome {
    let pairs: Vec<(GrowthFunction, f64)> = vec![
        (ks(0.0), 0.5),
        (ks(0.0), 2.0),
        (ks(0.0), 8.0),
        (ks(0.25), 1.0),
        (ks(0.25), 5.0),
        (ks(0.5), 0.1),
        (ks(0.5), 3.0),
        (ks(0.75), 1.0),
        (ks(0.75), 4.0),
        (GrowthFunction::ks_dual(0.5).unwrap(), 0.5),
        (GrowthFunction::ks_dual(0.5).unwrap(), 2.0),
        (GrowthFunction::exp_scaled(1.0).unwrap(), 0.3),
        (GrowthFunction::exp_scaled(1.0).unwrap(), 3.0),
        (GrowthFunction::exp_scaled(2.0).unwrap(), 1.0),
        (GrowthFunction::exp_k(2).unwrap(), 0.5),
        (GrowthFunction::exp_k(2).unwrap(), 2.0),
        (GrowthFunction::bell_dual(2).unwrap(), 0.5),
        (GrowthFunction::bell_dual(2).unwrap(), 3.0),
        (GrowthFunction::bell_dual(3).unwrap(), 1.0),
        (GrowthFunction::exp_scaled(0.5).unwrap(), 6.0),
    ];
    let mut worst: f64 = 0.0;
    for (u, r) in &pairs {
        let table = legendre_table(u, 600).map_err(|e| format!("{u}: {e}"))?;
        let alpha = alpha_from_table(&table);
        for (which, direct) in [
            (Egf::InvAlpha, l_function_at(&table, *r).map_err(|e| format!("{u} L({r}): {e}"))?),
            (Egf::Alpha, l_sharp_at(&table, *r).map_err(|e| format!("{u} L#({r}): {e}"))?),
        ] {
            let via = egf_eval(&alpha, which, *r).map_err(|e| format!("{u} {which:?}({r}): {e}"))?;
            let rel = (via.sum.ln() - direct.sum.ln()).exp_m1().abs();
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-10, || format!("relative disagreement {worst:e}"))?;
    Ok(format!("{} pairs, max relative disagreement {worst:.3e}", pairs.len()))
}

fn bell_example() -> Outcome {
    let u_star = numeric_dual(&GrowthFunction::exp_k(2).unwrap());
    let v = GrowthFunction::bell_dual(2).unwrap();
    let cert = find_equivalence(&u_star, &v, (1.0, 1e6), 60).map_err(|e| e.to_string())?;
    ensure(cert.holds, || format!("no certificate: {:?}", cert.note))?;
    let alpha_v = alpha_from_growth(&v, 60).map_err(|e| e.to_string())?;
    let b2 = bell_numbers(2, 60).map_err(|e| e.to_string())?.alpha();
    let cfg = EquivalenceConfig { window: Some((20, 60)), spread_cap: 1.0 };
    let seq = sequences_equivalent_with(&alpha_v.logs(), &b2.logs(), &cfg).map_err(|e| e.to_string())?;
    ensure(seq.spread <= 1.0, || format!("exponent spread {}", seq.spread))?;
    Ok(format!(
        "c1={:.4} a1={} c2={:.4} a2={}; d(n)/n spread {:.4} on [20, 60]",
        cert.c1, cert.a1, cert.c2, cert.a2, seq.spread
    ))
}

fn stirling_sandwich() -> Outcome {
    for n in 1..=170 {
        let x = n as f64;
        let lf = ln_factorial(n);
        let lo = x * x.ln() - x;
        let hi = 1.0 + 0.5 * x * 2f64.ln() + x * (x.ln() - 1.0);
        ensure(lo <= lf + 1e-9 && lf <= hi + 1e-9, || format!("n={n}: {lo} <= {lf} <= {hi} fails"))?;
    }
    Ok("n = 1..170".into())
}

fn brute_force_oracle() -> Outcome {
    let cat = catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    const POINTS: usize = 1_000_000;
    for _ in 0..25 {
        let u = &cat[rng.gen_range(0..cat.len())];
        let t: f64 = rng.gen_range(0.5..50.0);
        let hi = u.domain_max().ln().min(30.0);
        let lo = -30.0;
        let mut best = f64::INFINITY;
        for i in 0..POINTS {
            let x = lo + (hi - lo) * i as f64 / (POINTS - 1) as f64;
            if let Ok(l) = u.log_eval(x.exp()) {
                best = best.min(l - t * x);
            }
        }
        let got = legendre_at(u, t).map_err(|e| format!("{u} t={t}: {e}"))?.ln();
        let d = (got - best).abs();
        worst = worst.max(d);
        ensure(d <= 1e-7, || format!("{u} t={t}: {got} vs grid {best}"))?;
    }
    Ok(format!("25 pairs, max gap {worst:.3e} (tol 1e-7)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("legendre closed form", legendre_closed_form),
        ("dual closed form", dual_closed_form),
        ("dual Legendre identity", dual_legendre_identity),
        ("reconstruction", reconstruction),
        ("L-function upper bound", lfunction_upper_bound),
        ("Legendre inequalities", legendre_inequalities),
        ("ks end-to-end report", ks_end_to_end),
        ("implication lattice", implication_lattice),
        ("Bell numbers", bell_numbers_b2),
        ("generating-function cross paths", egf_cross_paths),
        ("Bell example equivalence", bell_example),
        ("Stirling sandwich", stirling_sandwich),
        ("brute-force Legendre oracle", brute_force_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
