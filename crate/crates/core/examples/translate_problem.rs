//! Translate a TPTP problem into a flat article: one item per axiom and the
//! conjecture as a theorem with its proof pending.
//!
//!     cargo run --example translate_problem [FILE.p]

use std::path::PathBuf;

use tptp_mizar::mizar::{render_article, render_manifest, translate_problem};
use tptp_mizar::tptp::TptpReader;

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/PUZ001+1.p")
    });
    let units = TptpReader::from_env().read_file(&path).unwrap_or_else(|e| panic!("{e}"));
    match translate_problem(&units) {
        Ok((article, manifest)) => {
            print!("{}", render_article(&article));
            println!("\n:: environment manifest\n{}", render_manifest(&manifest));
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            std::process::exit(2);
        }
    }
}
