//! Higher-order Bell numbers b_k(n), defined by exp_k(r) = exp_k(0) Σ b_k(n) r^n / n!.

use cks_toolkit::conditions::{full_report, Subject};
use cks_toolkit::sequences::bell_numbers;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in [2, 3] {
        let b = bell_numbers(k, 12)?;
        let vals: Vec<String> = (0..=12).map(|n| format!("{}", b.value(n))).collect();
        println!("b_{k}: {}", vals.join(", "));
    }

    let b2 = bell_numbers(2, 60)?;
    println!("b_2(60) = {:e} (relative error estimate {:.1e})", b2.value(60), b2.rel_error_estimate);
    let rep = full_report(&Subject::Alpha(b2.alpha()), 60)?;
    for (id, v) in &rep.entries {
        println!("  {id:<9} {}", v.status);
    }
    Ok(())
}
