//! Weight sequences α(n) = 1/(ℓ_u(n) n!) and their CSV form.

use std::io::Cursor;

use cks_toolkit::growth::GrowthFunction;
use cks_toolkit::sequences::{alpha_from_growth, AlphaSequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = GrowthFunction::exp_scaled(1.0)?;
    let alpha = alpha_from_growth(&u, 12)?;

    let mut csv = Vec::new();
    alpha.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv.clone())?);

    let back = AlphaSequence::read_csv(Cursor::new(csv))?;
    assert_eq!(back.logs(), alpha.logs());
    println!("round trip ok: {} terms from {}", back.len(), back.provenance);
    Ok(())
}
