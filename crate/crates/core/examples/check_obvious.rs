//! The obviousness checker on the classic resolution example: the step is
//! not obvious between universally quantified clauses, but is obvious
//! between their instances with the variables held fixed. The brute-force
//! oracle confirms that both are valid entailments.
//!
//!     cargo run --example check_obvious

use tptp_mizar::obvious::{brute_force_entails, is_obvious, ObviousnessQuery, ObviousnessVerdict};
use tptp_mizar::parse_formula;

fn main() {
    let f = |s: &str| parse_formula(s).unwrap();
    let premises = vec![f("![X]:(~l(X)|d(X))"), f("![X,Y]:(~l(X)|~d(X)|~d(Y))")];
    let conclusion = f("![X,Y]:(~l(X)|~d(Y))");
    let q = ObviousnessQuery::new(premises.clone(), conclusion.clone());
    println!("formula level:  {}", is_obvious(&q).name());

    let open = vec![f("~l(X)|d(X)"), f("~l(X)|~d(X)|~d(Y)")];
    let q = ObviousnessQuery::new(open, f("~l(X)|~d(Y)")).with_fixed(vec!["X".into(), "Y".into()]);
    match is_obvious(&q) {
        ObviousnessVerdict::Obvious(sel) => {
            println!("instance level: Obvious");
            for (i, s) in sel.premises.iter().enumerate() {
                let how = match s {
                    Some(s) => s.iter().map(|(v, t)| format!("{v}:={t}")).collect::<Vec<_>>().join(", "),
                    None => "used as stated".into(),
                };
                println!("    premise {}: {how}", i + 1);
            }
        }
        v => println!("instance level: {}", v.name()),
    }
    for d in 1..=3 {
        println!("entailed at domain size {d}: {:?}", brute_force_entails(&premises, &conclusion, d));
    }
}
