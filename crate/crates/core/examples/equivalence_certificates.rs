//! Two-sided domination certificates between growth functions, and the
//! growth bounds K u*(a s)^{1/2} and K u(a s)^{1/2}.

use cks_toolkit::equivalence::{find_equivalence, growth_bound, verify_thm27, BoundSide};
use cks_toolkit::growth::GrowthFunction;
use cks_toolkit::legendre::l_function_growth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = GrowthFunction::ks(0.5)?;
    let l = l_function_growth(&u, 4.0 * 50.0)?;
    let c = find_equivalence(&u, &l, (0.5, 50.0), 40)?;
    println!(
        "{u} ~ L_u on [0.5, 50]: holds={} c1={:.4} a1={} c2={:.4} a2={}",
        c.holds, c.c1, c.a1, c.c2, c.a2
    );

    for beta in [0.0, 0.5] {
        let u = GrowthFunction::ks(beta)?;
        let triple = verify_thm27(&u, 64, (0.5, 5.0), 25)?;
        println!("{u}: {}", triple.status);
        for (left, right, c) in &triple.certificates {
            println!("  {left:>9} ~ {right:<9} c1={:.4} a1={:<6} c2={:.4} a2={}", c.c1, c.a1, c.c2, c.a2);
        }
    }

    let u = GrowthFunction::ks(0.0)?;
    for s in [0.0, 1.0, 4.0] {
        let g = growth_bound(&u, BoundSide::Generalized, 1.0, 1.0, s)?;
        let t = growth_bound(&u, BoundSide::Test, 2.0, 0.5, s)?;
        println!("s={s}: generalized {:.6}  test {:.6}", g.ln().exp(), t.ln().exp());
    }
    Ok(())
}
