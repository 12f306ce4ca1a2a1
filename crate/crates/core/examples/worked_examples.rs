//! The KS family and the Bell-number example, reproduced end to end.

use cks_toolkit::equivalence::{verify_examples, Example};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for which in [Example::Ks { beta: 0.25 }, Example::Ks { beta: 0.0 }, Example::Bell { k: 2 }] {
        let rep = verify_examples(which, 60)?;
        println!("{which:?}");
        for c in &rep.checks {
            println!("  {:<28} {:<6} value {:.3e} (tol {:.1e})", c.name, c.status, c.value, c.tolerance);
        }
        if let Some(c) = &rep.certificate {
            println!("  certificate c1={:.4} a1={} c2={:.4} a2={} on {:?}", c.c1, c.a1, c.c2, c.a2, c.tested_range);
        }
        if let Some(s) = &rep.sequence_equivalence {
            println!("  sequence exponent spread {:.4} over n in {:?}", s.spread, s.window);
        }
    }
    Ok(())
}
