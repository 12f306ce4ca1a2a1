//! Full condition reports, printed as diff-stable JSON.

use cks_toolkit::conditions::{full_report, Subject};
use cks_toolkit::growth::GrowthFunction;
use cks_toolkit::report::{condition_report_json, to_json_string};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = GrowthFunction::ks(0.5)?;
    let rep = full_report(&Subject::Growth(u.clone()), 60)?;
    print!("{}", to_json_string(&condition_report_json(&rep, Some(&u), Vec::new())));

    // exp(exp(r)) misses the growth hypotheses; the sequence conditions are
    // still reported, with a note saying so
    let e2 = GrowthFunction::exp_k(2)?;
    let rep = full_report(&Subject::Growth(e2), 60)?;
    for (id, v) in &rep.entries {
        println!("{id:<9} {}", v.status);
    }
    for note in &rep.notes {
        println!("note: {note}");
    }
    Ok(())
}
