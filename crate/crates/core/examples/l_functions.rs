//! L_u and L#_u two ways: directly from the ℓ table and as generating
//! functions of α. Also shows the bound log L_u(r) <= 2 + log u(e r).

use std::f64::consts::E;

use cks_toolkit::growth::GrowthFunction;
use cks_toolkit::legendre::{l_function_at, l_sharp_at, legendre_table};
use cks_toolkit::sequences::{alpha_from_table, egf_eval, Egf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = GrowthFunction::ks(0.5)?;
    let table = legendre_table(&u, 600)?;
    let alpha = alpha_from_table(&table);

    println!("{:>6} {:>18} {:>18} {:>18} {:>18}", "r", "log L", "log G_1/alpha", "log L#", "log G_alpha");
    for r in [0.1, 1.0, 5.0, 20.0] {
        let l = l_function_at(&table, r)?;
        let g_inv = egf_eval(&alpha, Egf::InvAlpha, r)?;
        let ls = l_sharp_at(&table, r)?;
        let g = egf_eval(&alpha, Egf::Alpha, r)?;
        println!(
            "{r:>6} {:>18.12} {:>18.12} {:>18.12} {:>18.12}",
            l.sum.ln(),
            g_inv.sum.ln(),
            ls.sum.ln(),
            g.sum.ln()
        );
        let bound = 2.0 + u.log_eval(E * r)?;
        assert!(l.sum.ln() <= bound + 1e-8);
    }
    Ok(())
}
