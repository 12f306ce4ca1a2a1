//! User-supplied growth functions from an expression in r.

use cks_toolkit::growth::{check_class, check_u_conditions, parse_growth, ClassTag, GridSpec};
use cks_toolkit::legendre::legendre_table;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = parse_growth("exp(r^2/2) + r")?;
    println!("parsed {u}");

    for class in [ClassTag::LogExpConvex, ClassTag::LogXkConvex(2.0), ClassTag::CPlusHalf] {
        let ev = check_class(&u, class, &GridSpec::default())?;
        println!("  {class:<18} {}  margin {:.2e}", ev.verdict, ev.margin);
    }
    for ev in check_u_conditions(&u)? {
        println!("  {:<18} {}", ev.class, ev.verdict);
    }

    let table = legendre_table(&u, 6)?;
    println!("log ell(0..6) = {:?}", table.log_ell_f64());

    match parse_growth("exp(r") {
        Err(e) => println!("bad input is rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
