//! Expand a resolution step that is not obvious as stated into a sub-proof
//! over instances of its parents.
//!
//!     cargo run --example expand_resolution

use tptp_mizar::expand::{expand_inference, Expansion};
use tptp_mizar::mizar::render_formula;
use tptp_mizar::parse_formula;

fn main() {
    let f = |s: &str| parse_formula(s).unwrap();
    let parents = [f("~l(X)|d(X)"), f("~l(X)|~d(X)|~d(Y)")];
    let conclusion = f("~l(X)|~d(Y)");
    match expand_inference(&parents, &conclusion, &[None, None], tptp_mizar::obvious::DEFAULT_BUDGET) {
        Some(Expansion::Direct) => println!("obvious as stated"),
        Some(Expansion::SubProof(sp)) => {
            println!("S: {}", render_formula(&conclusion));
            println!("proof");
            for step in &sp.instance_steps {
                println!("  {}: {} by P{};", step.label, render_formula(&step.formula), step.premise + 1);
            }
            println!("  thus thesis by {};", sp.final_labels().join(","));
            println!("end;");
            println!(":: fixed variables: {}", sp.fixed_variables.join(","));
        }
        None => println!("no expansion found"),
    }
}
