//! List the skolemization steps of a refutation and the Henkin implication
//! that licenses each one.
//!
//!     cargo run --example skolem_bridge [FILE.tstp]

use std::path::PathBuf;

use tptp_mizar::derivation::build_graph;
use tptp_mizar::skolem::justify_skolem_steps;
use tptp_mizar::tptp::{write_formula, TptpReader};

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/PUZ001+1.tstp")
    });
    let units = TptpReader::from_env().read_file(&path).unwrap_or_else(|e| panic!("{e}"));
    let g = build_graph(units).unwrap_or_else(|e| panic!("{e}"));
    match justify_skolem_steps(&g) {
        Ok(steps) => {
            for j in steps {
                let mut axiom = String::new();
                write_formula(&mut axiom, &j.henkin_axiom).unwrap();
                println!("{}: step {} from {} introduces {}", j.manifest_label(), j.step, j.parent, j.skolem_symbol);
                println!("    {axiom}");
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            std::process::exit(2);
        }
    }
}
