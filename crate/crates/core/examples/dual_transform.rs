//! Numeric dual transform u*(r) = sup_s e^{2√(rs)}/u(s) against known closed forms.

use cks_toolkit::growth::{GridSpec, GrowthFunction};
use cks_toolkit::legendre::{dual_legendre_at, numeric_dual};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pairs = [
        (GrowthFunction::ks(0.0)?, GrowthFunction::ks(0.0)?),
        (GrowthFunction::ks(0.5)?, GrowthFunction::ks_dual(0.5)?),
        (GrowthFunction::exp_scaled(2.0)?, GrowthFunction::exp_scaled(0.5)?),
    ];
    for (u, closed) in &pairs {
        let mut worst: f64 = 0.0;
        for r in GridSpec::geometric(1e-2, 1e2, 25).points {
            let got = dual_legendre_at(u, r)?.ln();
            worst = worst.max((got - closed.log_eval(r)?).abs() / closed.log_eval(r)?.abs().max(1.0));
        }
        println!("{u:<22} dual ~ {closed:<22} max scaled gap {worst:.2e}");
    }

    // the numeric dual is itself a growth function and can be evaluated anywhere
    let star = numeric_dual(&GrowthFunction::exp_k(2)?);
    for r in [1.0, 10.0, 100.0] {
        println!("log exp_2*({r}) = {:.10}", star.log_eval(r)?);
    }
    Ok(())
}
