//! ℓ_u(t) = inf_r u(r)/r^t for the KS family, checked against (e/n)^{(1+β)n}.

use cks_toolkit::growth::GrowthFunction;
use cks_toolkit::legendre::{legendre_at, legendre_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for beta in [0.0, 0.5] {
        let u = GrowthFunction::ks(beta)?;
        let table = legendre_table(&u, 8)?;
        println!("{u}");
        println!("{:>3} {:>22} {:>22} {:>12}", "n", "log ell (numeric)", "closed form", "argmin r");
        for (n, (l, r)) in table.log_ell.iter().zip(&table.argmin).enumerate() {
            let x = n as f64;
            let closed = if n == 0 { 0.0 } else { (1.0 + beta) * x * (1.0 - x.ln()) };
            println!("{n:>3} {:>22.15} {closed:>22.15} {r:>12.6}", l.ln());
        }
    }

    // non-integer orders work too
    let u = GrowthFunction::ks(0.0)?;
    println!("ell(2.5) for e^r = {:.12}", legendre_at(&u, 2.5)?.to_real());
    Ok(())
}
