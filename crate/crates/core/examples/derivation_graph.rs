//! Build the derivation DAG of an E refutation and show, per step, its
//! class, whether it depends on the conjecture, and whether it is used.
//!
//!     cargo run --example derivation_graph [FILE.tstp]

use std::path::PathBuf;

use tptp_mizar::derivation::build_graph;
use tptp_mizar::tptp::TptpReader;

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/unused_branch.tstp")
    });
    let units = TptpReader::from_env().read_file(&path).unwrap_or_else(|e| panic!("{e}"));
    let g = build_graph(units).unwrap_or_else(|e| panic!("{e}"));
    let flags = g.flags();
    println!("{} units, {} edges, sink {}", g.len(), g.edge_count(), g.sink().unwrap_or("(none)"));
    println!("{:<10} {:<18} {:<11} {:<6} parents", "unit", "class", "conj-dep", "used");
    for name in g.topological_order() {
        let f = &flags[name];
        println!(
            "{:<10} {:<18} {:<11} {:<6} {}",
            name,
            format!("{:?}", g.classify_step(name)),
            f.depends_on_conjecture,
            f.used_in_refutation,
            g.parents(name).join(",")
        );
    }
    let pruned = g.prune_unused();
    println!("after pruning: {} units", pruned.len());
}
